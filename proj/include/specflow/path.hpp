#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "specflow/algebra.hpp"

namespace specflow {

/// A signed passage of one sample point's value through infinity.
/// direction = +1: the value runs to +inf as t increases to `t` and returns
/// from -inf (an "up-wrap"); -1 is the mirror image.
struct PoleWrap {
  double t;
  int direction;
};

struct EndpointInfo {
  bool invertible;
  double margin;  // smallest |eigenvalue| (min |value| on grids)
};

/// A parameterized family t in [0,1] of Hermitian elements with value and
/// derivative access. Derivatives fall back to central finite differences
/// (one-sided second order at the interval ends) when no analytic accessor is
/// supplied. Breakpoints mark parameters that quadrature panels must not
/// straddle; wraps (grid backend) record signed passages through infinity per
/// sample point.
class OperatorPath {
 public:
  using ValueFn = std::function<Element(double, Side)>;

  OperatorPath(AlgebraPtr algebra, ValueFn value, ValueFn derivative = {},
               std::vector<double> breakpoints = {},
               std::vector<std::vector<PoleWrap>> wraps = {}, std::string provenance = "sampled");

  Element value(double t, Side side = Side::kInterior) const;
  Element derivative(double t, Side side = Side::kInterior) const;
  bool has_analytic_derivative() const { return static_cast<bool>(derivative_); }

  const AlgebraPtr& algebra() const { return algebra_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<std::vector<PoleWrap>>& wraps() const { return wraps_; }
  bool has_wraps() const;
  const std::string& provenance() const { return provenance_; }

  EndpointInfo endpoint_start() const;
  EndpointInfo endpoint_end() const;

  double finite_difference_step() const { return fd_step_; }

 private:
  AlgebraPtr algebra_;
  ValueFn value_;
  ValueFn derivative_;
  std::vector<double> breakpoints_;
  std::vector<std::vector<PoleWrap>> wraps_;
  std::string provenance_;
  double fd_step_ = 1e-6;
};

/// (1-t) A + t B.
OperatorPath make_linear_path(const Element& a, const Element& b);
/// (1-t) A + t B + t(1-t) C.
OperatorPath make_quadratic_path(const Element& a, const Element& b, const Element& c);
/// Piecewise-linear interpolation of Hermitian samples (t_i strictly
/// increasing inside [0,1], first 0 and last 1); sample times become
/// breakpoints.
OperatorPath make_sampled_path(std::vector<std::pair<double, Element>> samples);
/// The path of bounded transforms t -> F(D_t) with the divided-difference
/// derivative d/dt F(D_t).
OperatorPath bounded_transform_path(const OperatorPath& path);

/// Path algebra. Concatenation requires p1(1) = p2(0); reversal flips
/// orientation; conjugation by a family of unitaries (checked to 1e-12).
OperatorPath concat(const OperatorPath& p1, const OperatorPath& p2);
OperatorPath reverse(const OperatorPath& p);
OperatorPath conjugate(const OperatorPath& p, std::function<Element(double)> unitary);

/// Consistency check of the wrap annotations: each annotated wrap must see
/// values of the advertised signs on either side. Returns a description of
/// the first violation, or nullopt.
std::optional<std::string> validate_wraps(const OperatorPath& path, double delta = 1e-7);

}  // namespace specflow
