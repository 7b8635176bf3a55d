#pragma once

#include <functional>
#include <vector>

#include "specflow/algebra.hpp"

namespace specflow {

/// A path s : [a,b] -> invertible elements of the form 1 + trace-class.
/// Derivatives fall back to central finite differences with step fd_step.
struct InvertibleLoop {
  double a = 0.0;
  double b = 1.0;
  std::function<Element(double, Side)> value;
  std::function<Element(double, Side)> derivative;  // optional
  std::vector<double> breakpoints;
  bool closed = false;
  double fd_step = 1e-6;

  Element value_at(double t, Side side = Side::kInterior) const;
  Element derivative_at(double t, Side side = Side::kInterior) const;
};

struct WindingResult {
  double value = 0.0;
  double error_estimate = 0.0;
  /// |Im| of the computed winding number; for closed loops this is a
  /// diagnostic that must stay below the quadrature tolerance.
  double imaginary_residual = 0.0;
  long evaluations = 0;
  std::vector<std::string> warnings;
};

/// w(s) = (1/2 pi i) integral tau(s^{-1} s') over [a, b], by adaptive Simpson
/// quadrature split at the loop's breakpoints. Every sampled element must
/// have smallest singular value above tol::kInvertibility.
WindingResult winding_number(const InvertibleLoop& loop, const QuadratureConfig& quad);

/// A two-parameter family on [x0,x1] x [y0,y1] with invertible values.
struct RectangleFamily {
  double x0, x1, y0, y1;
  std::function<Element(double, double)> value;
};

/// w(h(.,y0)) + w(h(x1,.)) - w(h(x0,.)) - w(h(.,y1)); vanishes for smooth
/// families, which certifies homotopy invariance of the winding number.
double rectangle_defect(const RectangleFamily& h, const QuadratureConfig& quad);

}  // namespace specflow
