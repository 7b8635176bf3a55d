#include "specflow/path.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace specflow {

OperatorPath::OperatorPath(AlgebraPtr algebra, ValueFn value, ValueFn derivative,
                           std::vector<double> breakpoints,
                           std::vector<std::vector<PoleWrap>> wraps, std::string provenance)
    : algebra_(std::move(algebra)),
      value_(std::move(value)),
      derivative_(std::move(derivative)),
      breakpoints_(std::move(breakpoints)),
      wraps_(std::move(wraps)),
      provenance_(std::move(provenance)) {
  if (!algebra_) throw ValidationError("path: null algebra");
  if (!value_) throw ValidationError("path: missing value accessor");
  std::sort(breakpoints_.begin(), breakpoints_.end());
  breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
  if (!wraps_.empty() && algebra_->backend() != TracialAlgebra::Backend::kGrid)
    throw ValidationError("path: wrap annotations require a grid backend");
}

Element OperatorPath::value(double t, Side side) const {
  if (t < -1e-12 || t > 1.0 + 1e-12)
    throw ValidationError("path: parameter outside [0,1]");
  return value_(std::clamp(t, 0.0, 1.0), side);
}

Element OperatorPath::derivative(double t, Side side) const {
  t = std::clamp(t, 0.0, 1.0);
  if (derivative_) return derivative_(t, side);
  double h = fd_step_;
  if (t - h >= 0.0 && t + h <= 1.0) {
    return (0.5 / h) * (value_(t + h, side) - value_(t - h, side));
  }
  if (t + 2 * h <= 1.0) {  // one-sided, second order
    return (0.5 / h) *
           (-3.0 * value_(t, side) + 4.0 * value_(t + h, side) - value_(t + 2 * h, side));
  }
  return (0.5 / h) *
         (3.0 * value_(t, side) - 4.0 * value_(t - h, side) + value_(t - 2 * h, side));
}

bool OperatorPath::has_wraps() const {
  return std::any_of(wraps_.begin(), wraps_.end(),
                     [](const std::vector<PoleWrap>& w) { return !w.empty(); });
}

namespace {
EndpointInfo endpoint_info(const Element& e) {
  double margin = smallest_singular_value(e);
  return EndpointInfo{margin > tol::kKernel, margin};
}
}  // namespace

EndpointInfo OperatorPath::endpoint_start() const { return endpoint_info(value(0.0, Side::kRight)); }
EndpointInfo OperatorPath::endpoint_end() const { return endpoint_info(value(1.0, Side::kLeft)); }

OperatorPath make_linear_path(const Element& a, const Element& b) {
  if (!a.hermitian() || !b.hermitian())
    throw ValidationError("linear path: endpoints must be Hermitian");
  Element diff = b - a;
  auto value = [a, b](double t, Side) { return (1.0 - t) * a + t * b; };
  auto deriv = [diff](double, Side) { return diff; };
  return OperatorPath(a.algebra(), value, deriv, {}, {}, "linear");
}

OperatorPath make_quadratic_path(const Element& a, const Element& b, const Element& c) {
  if (!a.hermitian() || !b.hermitian() || !c.hermitian())
    throw ValidationError("quadratic path: data must be Hermitian");
  auto value = [a, b, c](double t, Side) { return (1.0 - t) * a + t * b + (t * (1.0 - t)) * c; };
  auto deriv = [a, b, c](double t, Side) { return b - a + (1.0 - 2.0 * t) * c; };
  return OperatorPath(a.algebra(), value, deriv, {}, {}, "quadratic");
}

OperatorPath make_sampled_path(std::vector<std::pair<double, Element>> samples) {
  if (samples.size() < 2) throw ValidationError("sampled path: needs at least two samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!samples[i].second.hermitian())
      throw ValidationError("sampled path: sample " + std::to_string(i) + " is not Hermitian");
    if (i > 0 && !(samples[i].first > samples[i - 1].first))
      throw ValidationError("sampled path: sample times must be strictly increasing");
  }
  if (std::abs(samples.front().first) > 1e-12 || std::abs(samples.back().first - 1.0) > 1e-12)
    throw ValidationError("sampled path: samples must start at t = 0 and end at t = 1");
  samples.front().first = 0.0;
  samples.back().first = 1.0;

  auto shared = std::make_shared<std::vector<std::pair<double, Element>>>(std::move(samples));
  std::vector<double> breakpoints;
  for (std::size_t i = 1; i + 1 < shared->size(); ++i) breakpoints.push_back((*shared)[i].first);

  auto segment = [shared](double t) {
    std::size_t hi = 1;
    while (hi + 1 < shared->size() && (*shared)[hi].first < t) ++hi;
    return hi;
  };
  auto value = [shared, segment](double t, Side) {
    std::size_t hi = segment(t);
    const auto& [t0, e0] = (*shared)[hi - 1];
    const auto& [t1, e1] = (*shared)[hi];
    double s = (t - t0) / (t1 - t0);
    return (1.0 - s) * e0 + s * e1;
  };
  auto deriv = [shared, segment](double t, Side side) {
    std::size_t hi = segment(t);
    // at an interior sample the derivative is one-sided; honor the hint
    if (side == Side::kLeft && hi > 1 && std::abs((*shared)[hi - 1].first - t) < 1e-15) --hi;
    const auto& [t0, e0] = (*shared)[hi - 1];
    const auto& [t1, e1] = (*shared)[hi];
    return (1.0 / (t1 - t0)) * (e1 - e0);
  };
  return OperatorPath(shared->front().second.algebra(), value, deriv, std::move(breakpoints), {},
                      "sampled");
}

OperatorPath bounded_transform_path(const OperatorPath& path) {
  auto bt = FunctionSpec::bounded_transform();
  auto value = [path, bt](double t, Side side) { return func_calc(bt, path.value(t, side)); };
  OperatorPath::ValueFn deriv;
  deriv = [path, bt](double t, Side side) {
    return derivative_of_function(bt, path.value(t, side), path.derivative(t, side));
  };
  return OperatorPath(path.algebra(), value, deriv, path.breakpoints(), path.wraps(),
                      path.provenance() + ":bounded");
}

OperatorPath concat(const OperatorPath& p1, const OperatorPath& p2) {
  if (!p1.algebra()->same_as(*p2.algebra()))
    throw ValidationError("concat: paths live in different algebras");
  Element end1 = p1.value(1.0, Side::kLeft);
  Element start2 = p2.value(0.0, Side::kRight);
  if (distance(end1, start2) > tol::kEndpoint * (1.0 + operator_norm(end1)))
    throw ValidationError("concat: p1(1) != p2(0)");

  std::vector<double> breakpoints{0.5};
  for (double b : p1.breakpoints()) breakpoints.push_back(0.5 * b);
  for (double b : p2.breakpoints()) breakpoints.push_back(0.5 + 0.5 * b);
  std::vector<std::vector<PoleWrap>> wraps;
  if (p1.has_wraps() || p2.has_wraps()) {
    std::size_t n = p1.algebra()->points().size();
    wraps.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!p1.wraps().empty())
        for (const auto& w : p1.wraps()[i]) wraps[i].push_back({0.5 * w.t, w.direction});
      if (!p2.wraps().empty())
        for (const auto& w : p2.wraps()[i]) wraps[i].push_back({0.5 + 0.5 * w.t, w.direction});
    }
  }
  auto value = [p1, p2](double t, Side side) {
    if (t < 0.5) return p1.value(2.0 * t, side);
    if (t > 0.5) return p2.value(2.0 * t - 1.0, side);
    return side == Side::kLeft ? p1.value(1.0, Side::kLeft) : p2.value(0.0, Side::kRight);
  };
  auto deriv = [p1, p2](double t, Side side) {
    if (t < 0.5 || (t == 0.5 && side == Side::kLeft))
      return 2.0 * p1.derivative(std::min(2.0 * t, 1.0), side);
    return 2.0 * p2.derivative(std::max(2.0 * t - 1.0, 0.0), side);
  };
  return OperatorPath(p1.algebra(), value, deriv, std::move(breakpoints), std::move(wraps),
                      "concat");
}

OperatorPath reverse(const OperatorPath& p) {
  std::vector<double> breakpoints;
  for (double b : p.breakpoints()) breakpoints.push_back(1.0 - b);
  std::vector<std::vector<PoleWrap>> wraps;
  if (p.has_wraps()) {
    wraps.resize(p.wraps().size());
    for (std::size_t i = 0; i < wraps.size(); ++i)
      for (const auto& w : p.wraps()[i]) wraps[i].push_back({1.0 - w.t, -w.direction});
  }
  auto flip = [](Side s) {
    return s == Side::kLeft ? Side::kRight : (s == Side::kRight ? Side::kLeft : s);
  };
  auto value = [p, flip](double t, Side side) { return p.value(1.0 - t, flip(side)); };
  auto deriv = [p, flip](double t, Side side) { return -p.derivative(1.0 - t, flip(side)); };
  return OperatorPath(p.algebra(), value, deriv, std::move(breakpoints), std::move(wraps),
                      "reverse");
}

OperatorPath conjugate(const OperatorPath& p, std::function<Element(double)> unitary) {
  auto value = [p, unitary](double t, Side side) {
    Element u = unitary(t);
    Element uu = u * u.adjoint();
    if (distance(uu, Element::identity(u.algebra())) > 1e-12 * (1.0 + operator_norm(u)))
      throw ValidationError("conjugate: family is not unitary at t = " + std::to_string(t));
    Element v = u * p.value(t, side) * u.adjoint();
    // conjugation by a unitary preserves Hermiticity exactly up to rounding
    if (v.algebra()->backend() == TracialAlgebra::Backend::kBlock) {
      std::vector<Matrix> blocks = v.blocks();
      for (auto& b : blocks) b = 0.5 * (b + b.adjoint().eval());
      return Element::trusted(v.algebra(), std::move(blocks), {}, {}, true);
    }
    return v;
  };
  return OperatorPath(p.algebra(), value, {}, p.breakpoints(), p.wraps(), "conjugate");
}

std::optional<std::string> validate_wraps(const OperatorPath& path, double delta) {
  if (!path.has_wraps()) return std::nullopt;
  for (std::size_t i = 0; i < path.wraps().size(); ++i) {
    for (const auto& w : path.wraps()[i]) {
      double lo = std::max(0.0, w.t - delta), hi = std::min(1.0, w.t + delta);
      double before = path.value(lo, Side::kLeft).grid_values()[i].real();
      double after = path.value(hi, Side::kRight).grid_values()[i].real();
      bool ok = w.direction > 0 ? (before > 0.0 && after < 0.0) : (before < 0.0 && after > 0.0);
      if (!ok) {
        std::ostringstream os;
        os << "wrap at point " << i << ", t = " << w.t << " disagrees with sampled signs";
        return os.str();
      }
    }
  }
  return std::nullopt;
}

}  // namespace specflow
