#include "specflow/quadrature.hpp"

namespace specflow {

namespace {
double norm_of(double v) { return std::abs(v); }
double norm_of(const std::complex<double>& v) { return std::abs(v); }
}  // namespace

ComplexQuadrature integrate_complex(const std::function<std::complex<double>(double, Side)>& f,
                                    double a, double b, const QuadratureConfig& cfg,
                                    std::span<const double> breakpoints, int min_depth) {
  return detail::integrate_segmented<std::complex<double>>(
      f, [](const std::complex<double>& v) { return norm_of(v); }, a, b, cfg, breakpoints,
      min_depth);
}

RealQuadrature integrate_real(const std::function<double(double, Side)>& f, double a, double b,
                              const QuadratureConfig& cfg, std::span<const double> breakpoints,
                              int min_depth) {
  return detail::integrate_segmented<double>(
      f, [](double v) { return norm_of(v); }, a, b, cfg, breakpoints, min_depth);
}

RealQuadrature integrate_tail_from_one(const std::function<double(double)>& f,
                                       const QuadratureConfig& cfg, int min_depth) {
  // t = 1/u^2, dt = 2 u^{-3} du; the u = 0 endpoint stands for t = inf.
  auto transformed = [&f](double u, Side) -> double {
    if (u <= 0.0) return 0.0;
    double t = 1.0 / (u * u);
    return 2.0 * f(t) / (u * u * u);
  };
  return integrate_real(transformed, 0.0, 1.0, cfg, {}, min_depth);
}

}  // namespace specflow
