#include "specflow/winding.hpp"

#include <Eigen/LU>
#include <cmath>
#include <sstream>

namespace specflow {

Element InvertibleLoop::value_at(double t, Side side) const { return value(t, side); }

Element InvertibleLoop::derivative_at(double t, Side side) const {
  if (derivative) return derivative(t, side);
  double h = fd_step;
  if (t - h >= a && t + h <= b) return (0.5 / h) * (value(t + h, side) - value(t - h, side));
  if (t + 2 * h <= b)
    return (0.5 / h) * (-3.0 * value(t, side) + 4.0 * value(t + h, side) - value(t + 2 * h, side));
  return (0.5 / h) * (3.0 * value(t, side) - 4.0 * value(t - h, side) + value(t - 2 * h, side));
}

namespace {

// tau(s^{-1} s') without forming the inverse element: per block an LU solve,
// per grid point a scalar quotient.
Complex log_derivative_trace(const Element& s, const Element& sdot, double t) {
  double sigma = smallest_singular_value(s);
  if (sigma <= tol::kInvertibility) {
    std::ostringstream os;
    os << "winding: loop not invertible at t = " << t << " (smallest singular value " << sigma
       << ")";
    throw NumericalError(os.str());
  }
  Complex sum(0.0, 0.0);
  if (s.algebra()->backend() == TracialAlgebra::Backend::kBlock) {
    const auto& specs = s.algebra()->blocks();
    for (std::size_t k = 0; k < specs.size(); ++k) {
      Eigen::PartialPivLU<Matrix> lu(s.blocks()[k]);
      sum += specs[k].weight * lu.solve(sdot.blocks()[k]).trace();
    }
    return sum;
  }
  const auto& w = s.algebra()->weights();
  for (std::size_t i = 0; i < w.size(); ++i)
    sum += w[i] * sdot.grid_values()[i] / s.grid_values()[i];
  return sum;
}

}  // namespace

WindingResult winding_number(const InvertibleLoop& loop, const QuadratureConfig& quad) {
  if (!loop.value) throw ValidationError("winding: loop has no value accessor");
  if (!(loop.a < loop.b)) throw ValidationError("winding: empty parameter interval");

  WindingResult out;
  if (loop.closed) {
    Element sa = loop.value_at(loop.a, Side::kRight);
    Element sb = loop.value_at(loop.b, Side::kLeft);
    if (distance(sa, sb) > tol::kEndpoint * (1.0 + operator_norm(sa)))
      throw ValidationError("winding: loop marked closed but s(a) != s(b)");
  }

  auto integrand = [&loop](double t, Side side) -> Complex {
    Element s = loop.value_at(t, side);
    Element sdot = loop.derivative_at(t, side);
    return log_derivative_trace(s, sdot, t);
  };
  auto raw = integrate_complex(integrand, loop.a, loop.b, quad, loop.breakpoints, 6);
  if (!raw.converged) {
    std::ostringstream os;
    os << "winding: quadrature did not converge, achieved estimate " << raw.error_estimate;
    throw NumericalError(os.str());
  }

  Complex w = raw.value / Complex(0.0, 2.0 * kPi);
  out.value = w.real();
  out.imaginary_residual = std::abs(w.imag());
  out.error_estimate = raw.error_estimate / (2.0 * kPi);
  out.evaluations = raw.evaluations;
  if (loop.closed && out.imaginary_residual > quad.tolerance) {
    std::ostringstream os;
    os << "closed-loop winding has imaginary residual " << out.imaginary_residual;
    out.warnings.push_back(os.str());
  }
  return out;
}

double rectangle_defect(const RectangleFamily& h, const QuadratureConfig& quad) {
  auto edge = [&](auto value_fn, double a, double b) {
    InvertibleLoop loop;
    loop.a = a;
    loop.b = b;
    loop.value = [value_fn](double t, Side) { return value_fn(t); };
    return winding_number(loop, quad).value;
  };
  double bottom = edge([&h](double x) { return h.value(x, h.y0); }, h.x0, h.x1);
  double top = edge([&h](double x) { return h.value(x, h.y1); }, h.x0, h.x1);
  double left = edge([&h](double y) { return h.value(h.x0, y); }, h.y0, h.y1);
  double right = edge([&h](double y) { return h.value(h.x1, y); }, h.y0, h.y1);
  return bottom + right - left - top;
}

}  // namespace specflow
