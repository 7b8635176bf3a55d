#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "specflow/errors.hpp"

namespace specflow {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrtPi = 1.7724538509055160273;

/// Which one-sided limit an integrand should take when evaluated exactly on a
/// declared breakpoint. Interior nodes are two-sided.
enum class Side { kInterior, kLeft, kRight };

struct QuadratureConfig {
  double tolerance = 1e-8;
  int max_depth = 20;

  enum class ImproperSubstitution { kInverseSquare };  // t = 1/u^2 on [1, inf)
  ImproperSubstitution improper_substitution = ImproperSubstitution::kInverseSquare;

  // Exponentially decaying integrands may be truncated once their analytic
  // bound falls below tolerance * truncation_ratio.
  double truncation_ratio = 0.1;

  void validate() const {
    if (!(tolerance > 0.0)) throw ValidationError("quadrature: tolerance must be > 0");
    if (max_depth < 4) throw ValidationError("quadrature: max_depth must be >= 4");
    if (!(truncation_ratio > 0.0)) throw ValidationError("quadrature: truncation_ratio must be > 0");
  }
};

template <class T>
struct QuadratureOutcome {
  T value{};
  double error_estimate = 0.0;
  bool converged = true;
  long evaluations = 0;
};

using RealQuadrature = QuadratureOutcome<double>;
using ComplexQuadrature = QuadratureOutcome<std::complex<double>>;

namespace detail {

// Adaptive Simpson with Richardson extrapolation over a single segment.
// `f(t, side)` is evaluated with side hints only at the segment endpoints so
// that integrands with one-sided limits at breakpoints stay well-defined.
// `min_depth` forces an initial uniform refinement so that narrow interior
// features cannot slip through a panel whose coarse and fine estimates agree
// by accident.
template <class T, class F, class NormFn>
class AdaptiveSimpson {
 public:
  AdaptiveSimpson(F& f, NormFn& norm, const QuadratureConfig& cfg, int min_depth)
      : f_(f), norm_(norm), cfg_(cfg), min_depth_(min_depth) {}

  QuadratureOutcome<T> run(double a, double b) {
    QuadratureOutcome<T> out;
    if (a == b) return out;
    T fa = eval(a, Side::kRight, out);
    T fb = eval(b, Side::kLeft, out);
    double m = 0.5 * (a + b);
    T fm = eval(m, Side::kInterior, out);
    T whole = simpson(a, b, fa, fm, fb);
    out.value = recurse(a, b, fa, fm, fb, whole, cfg_.tolerance, 0, out);
    return out;
  }

 private:
  T eval(double t, Side side, QuadratureOutcome<T>& out) {
    ++out.evaluations;
    return f_(t, side);
  }

  static T simpson(double a, double b, const T& fa, const T& fm, const T& fb) {
    return ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
  }

  T recurse(double a, double b, const T& fa, const T& fm, const T& fb, const T& whole,
            double tol, int depth, QuadratureOutcome<T>& out) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    T flm = eval(lm, Side::kInterior, out);
    T frm = eval(rm, Side::kInterior, out);
    T left = simpson(a, m, fa, flm, fm);
    T right = simpson(m, b, fm, frm, fb);
    T both = left + right;
    T delta = both - whole;
    double err = norm_(delta) / 15.0;
    bool interval_resolved = depth >= min_depth_ && err <= tol;
    if (interval_resolved || depth >= cfg_.max_depth) {
      if (depth >= cfg_.max_depth && err > tol) out.converged = false;
      out.error_estimate += err;
      return both + (1.0 / 15.0) * delta;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, out) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, out);
  }

  F& f_;
  NormFn& norm_;
  const QuadratureConfig& cfg_;
  int min_depth_;
};

template <class T, class F, class NormFn>
QuadratureOutcome<T> integrate_segmented(F f, NormFn norm, double a, double b,
                                         const QuadratureConfig& cfg,
                                         std::span<const double> breakpoints, int min_depth) {
  cfg.validate();
  if (!(a < b)) throw ValidationError("quadrature: empty or reversed interval");
  std::vector<double> cuts;
  cuts.push_back(a);
  for (double t : breakpoints) {
    if (t > a && t < b) cuts.push_back(t);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  QuadratureOutcome<T> total;
  bool first = true;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    AdaptiveSimpson<T, F, NormFn> engine(f, norm, cfg, min_depth);
    auto piece = engine.run(cuts[i], cuts[i + 1]);
    if (first) {
      total.value = piece.value;
      first = false;
    } else {
      total.value = total.value + piece.value;
    }
    total.error_estimate += piece.error_estimate;
    total.converged = total.converged && piece.converged;
    total.evaluations += piece.evaluations;
  }
  return total;
}

}  // namespace detail

ComplexQuadrature integrate_complex(const std::function<std::complex<double>(double, Side)>& f,
                                    double a, double b, const QuadratureConfig& cfg,
                                    std::span<const double> breakpoints = {}, int min_depth = 4);

RealQuadrature integrate_real(const std::function<double(double, Side)>& f, double a, double b,
                              const QuadratureConfig& cfg, std::span<const double> breakpoints = {},
                              int min_depth = 4);

/// Improper integral over [1, inf) of a decaying integrand, evaluated through
/// the configured substitution (t = 1/u^2 maps it onto (0, 1]; the transformed
/// integrand is extended by its zero limit at u = 0).
RealQuadrature integrate_tail_from_one(const std::function<double(double)>& f,
                                       const QuadratureConfig& cfg, int min_depth = 5);

}  // namespace specflow
