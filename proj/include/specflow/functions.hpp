#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "specflow/errors.hpp"

namespace specflow {

using Complex = std::complex<double>;

/// Odd non-decreasing function compressing the real line (or [-1,1]) with
/// chi(+-1) = +-1 and chi^{-1}(0) = {0}. Three concrete kinds:
///   - smooth_gap(eps): chi^2 = 1 exactly outside (-eps, eps), C-infinity;
///   - chi_e:   (2/sqrt(pi)) int_0^x (1-y^2)^{-3/2} exp(1 - 1/(1-y^2)) dy on [-1,1];
///   - chi_p(p): (1/C_p)    int_0^x (1-y^2)^{(p-2)/2} dy on [-1,1], p >= 1.
/// chi_e and chi_p have no closed form; they are evaluated through memoized
/// cumulative quadrature tables of their defining integrals (target 1e-10).
class NormalizingFunction {
 public:
  enum class Kind { kSmoothGap, kChiE, kChiP };

  static NormalizingFunction smooth_gap(double eps);
  static NormalizingFunction chi_e();
  static NormalizingFunction chi_p(double p);

  Kind kind() const;
  double gap() const;    // eps for smooth_gap, 0 otherwise
  double power() const;  // p for chi_p, 0 otherwise

  double value(double x) const;
  double derivative(double x) const;

  /// The normalization constant of the defining integral: 1/N for smooth_gap's
  /// bump profile, C for chi_e (analytically sqrt(pi)/2), C_p for chi_p.
  double normalization_constant() const;

 private:
  struct Impl;
  explicit NormalizingFunction(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

/// A scalar function usable in functional calculus: deterministic evaluation
/// at any real point, optional derivative, optional finite limits at +-inf.
/// Values may be complex (e.g. the winding phase e^{i pi (chi+1)}).
class FunctionSpec {
 public:
  using ValueFn = std::function<Complex(double)>;

  static FunctionSpec identity();
  static FunctionSpec bounded_transform();  // x (1+x^2)^{-1/2}, limits +-1
  static FunctionSpec nonnegative_indicator();  // 1_{>=0}; 0 counts as nonnegative
  static FunctionSpec from_normalizing(const NormalizingFunction& chi);
  /// e^{i pi (chi(x)+1)}; both infinite limits equal 1, so loops built from it
  /// stay continuous across pole wraps.
  static FunctionSpec winding_phase(const NormalizingFunction& chi);
  /// chi(x (1+x^2)^{-1/2}) as a function on the whole line. For chi_e this is
  /// erf(x) (closed form); for chi_p the derivative is (1/C_p)(1+x^2)^{-(p+1)/2}.
  static FunctionSpec compose_with_bounded_transform(const NormalizingFunction& chi);

  static FunctionSpec from_real(std::string name, std::function<double(double)> f,
                                std::function<double(double)> df = {},
                                std::optional<double> limit_neg = std::nullopt,
                                std::optional<double> limit_pos = std::nullopt);
  static FunctionSpec from_complex(std::string name, ValueFn f, ValueFn df = {},
                                   std::optional<Complex> limit_neg = std::nullopt,
                                   std::optional<Complex> limit_pos = std::nullopt);

  Complex value(double x) const;
  bool has_derivative() const;
  Complex derivative(double x) const;

  /// Limit at sign*inf; nullopt means undefined.
  std::optional<Complex> limit_at(int sign) const;
  /// Limit of the derivative at sign*inf (used to decide whether a derivative
  /// through a pole wrap vanishes); nullopt means unknown.
  std::optional<Complex> derivative_limit_at(int sign) const;

  bool real_valued() const { return real_valued_; }
  const std::string& name() const { return name_; }

  FunctionSpec with_derivative_limits(Complex neg, Complex pos) const;

 private:
  FunctionSpec() = default;
  std::string name_;
  ValueFn value_;
  ValueFn derivative_;
  std::optional<Complex> limit_neg_, limit_pos_;
  std::optional<Complex> dlimit_neg_, dlimit_pos_;
  bool real_valued_ = true;
};

}  // namespace specflow
