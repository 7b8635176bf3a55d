#include "specflow/integral_formulas.hpp"

#include <cmath>
#include <sstream>

namespace specflow {

namespace {

struct WeightedSpectrum {
  std::vector<double> values;
  std::vector<double> weights;
};

// Eigenvalues with their trace weights; pole markers are skipped (their
// contribution to every integrand used here vanishes in the limit).
WeightedSpectrum weighted_spectrum(const Element& a) {
  WeightedSpectrum out;
  if (a.algebra()->backend() == TracialAlgebra::Backend::kBlock) {
    auto eig = hermitian_eigendecomposition(a);
    for (std::size_t k = 0; k < eig.eigenvalues.size(); ++k) {
      double w = a.algebra()->blocks()[k].weight;
      for (int i = 0; i < eig.eigenvalues[k].size(); ++i) {
        out.values.push_back(eig.eigenvalues[k][i]);
        out.weights.push_back(w);
      }
    }
    return out;
  }
  if (!a.hermitian()) throw ValidationError("weighted spectrum requires a Hermitian element");
  for (std::size_t i = 0; i < a.grid_values().size(); ++i) {
    if (a.pole_at(i) != Pole::kNone) continue;
    out.values.push_back(a.grid_values()[i].real());
    out.weights.push_back(a.algebra()->weights()[i]);
  }
  return out;
}

void require_margin(const Element& d, const char* who) {
  double margin = smallest_singular_value(d);
  if (margin <= tol::kKernel)
    throw NumericalError(std::string(who) + ": operator has spectrum at 0 (margin " +
                         std::to_string(margin) + ")");
}

// tau((dD/dt) g(D_t)) evaluated pointwise. Pole markers contribute zero when
// `pole_is_zero` (the g used decays at infinity faster than any admissible
// wrap speed); otherwise they are an error.
double trace_derivative_weighted(const OperatorPath& path, double t, Side side,
                                 const std::function<double(double)>& g, bool pole_is_zero,
                                 const char* who) {
  Element d = path.value(t, side);
  Element ddot = path.derivative(t, side);
  double sum = 0.0;
  if (path.algebra()->backend() == TracialAlgebra::Backend::kBlock) {
    auto eig = hermitian_eigendecomposition(d);
    for (std::size_t k = 0; k < eig.eigenvalues.size(); ++k) {
      const Matrix w = eig.eigenvectors[k].adjoint() * ddot.blocks()[k] * eig.eigenvectors[k];
      double c = path.algebra()->blocks()[k].weight;
      for (int i = 0; i < eig.eigenvalues[k].size(); ++i)
        sum += c * w(i, i).real() * g(eig.eigenvalues[k][i]);
    }
    return sum;
  }
  for (std::size_t i = 0; i < d.grid_values().size(); ++i) {
    double c = path.algebra()->weights()[i];
    if (d.pole_at(i) != Pole::kNone) {
      if (!pole_is_zero)
        throw NumericalError(std::string(who) +
                             ": integrand has a finite nonzero limit at a pole wrap; "
                             "this weight function does not decay there");
      continue;
    }
    if (ddot.pole_at(i) != Pole::kNone)
      throw NumericalError(std::string(who) + ": infinite derivative at a finite value");
    sum += c * ddot.grid_values()[i].real() * g(d.grid_values()[i].real());
  }
  return sum;
}

// (1/2) tau(2 P - 1 - chi(F)) from the weighted spectrum of a bounded
// endpoint; the 1_{>=0} convention counts 0 as nonnegative.
double half_defect_of(const Element& f_endpoint, const NormalizingFunction& chi) {
  auto spec = weighted_spectrum(f_endpoint);
  double sum = 0.0;
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    double sgn = spec.values[i] >= 0.0 ? 1.0 : -1.0;
    sum += spec.weights[i] * (sgn - chi.value(spec.values[i]));
  }
  return 0.5 * sum;
}

void require_invertible(const OperatorPath& path, const char* who) {
  auto s = path.endpoint_start();
  auto e = path.endpoint_end();
  if (!s.invertible || !e.invertible)
    throw NumericalError(std::string(who) + ": endpoint not invertible (margins " +
                         std::to_string(s.margin) + ", " + std::to_string(e.margin) + ")");
}

}  // namespace

FormulaResult sf_integral_chi(const OperatorPath& bounded_path, const NormalizingFunction& chi,
                              const QuadratureConfig& quad) {
  require_invertible(bounded_path, "sf_integral_chi");
  for (double t : {0.0, 0.5, 1.0}) {
    if (operator_norm(bounded_path.value(t)) > 1.0 + 1e-9)
      throw ValidationError("sf_integral_chi: ||F_t|| exceeds 1 at t = " + std::to_string(t));
  }

  bool p1_kind = chi.kind() == NormalizingFunction::Kind::kChiP && chi.power() <= 1.0;
  auto chi_prime = [&chi](double x) { return chi.derivative(x); };
  auto integrand = [&](double t, Side side) {
    return trace_derivative_weighted(bounded_path, t, side, chi_prime, !p1_kind,
                                     "sf_integral_chi");
  };
  auto q = integrate_real(integrand, 0.0, 1.0, quad, bounded_path.breakpoints(), 6);
  FormulaResult out;
  if (!q.converged) {
    std::ostringstream os;
    os << "sf_integral_chi: quadrature did not converge (estimate " << q.error_estimate << ")";
    throw NumericalError(os.str());
  }
  out.integral_term = 0.5 * q.value;
  out.error_estimate = 0.5 * q.error_estimate;
  out.defect_start = half_defect_of(bounded_path.value(0.0, Side::kRight), chi);
  out.defect_end = half_defect_of(bounded_path.value(1.0, Side::kLeft), chi);
  out.value = out.integral_term + out.defect_end - out.defect_start;
  return out;
}

HeatResult sf_heat(const OperatorPath& path, const QuadratureConfig& quad) {
  require_invertible(path, "sf_heat");
  auto gauss = [](double x) { return std::exp(-x * x); };
  auto integrand = [&](double t, Side side) {
    return trace_derivative_weighted(path, t, side, gauss, true, "sf_heat");
  };
  auto q = integrate_real(integrand, 0.0, 1.0, quad, path.breakpoints(), 6);
  if (!q.converged) {
    std::ostringstream os;
    os << "sf_heat: quadrature did not converge (estimate " << q.error_estimate << ")";
    throw NumericalError(os.str());
  }

  HeatResult out;
  out.integral_term = q.value / kSqrtPi;
  out.error_estimate = q.error_estimate / kSqrtPi;

  auto chi_e = NormalizingFunction::chi_e();
  Element d0 = path.value(0.0, Side::kRight);
  Element d1 = path.value(1.0, Side::kLeft);
  out.defect_start = half_defect_of(bounded_transform(d0), chi_e);
  out.defect_end = half_defect_of(bounded_transform(d1), chi_e);
  out.value = out.integral_term + out.defect_end - out.defect_start;

  // Second route for the endpoint terms: tau(2P - 1 - chi_e(F_D)) = eta_1(D).
  auto eta0 = eta1(d0, quad);
  auto eta1r = eta1(d1, quad);
  out.eta_route_start = eta0.value;
  out.eta_route_end = eta1r.value;
  out.endpoint_route_discrepancy = std::max(std::abs(2.0 * out.defect_start - eta0.value),
                                            std::abs(2.0 * out.defect_end - eta1r.value));
  double budget = 10.0 * (quad.tolerance + eta0.error_estimate + eta1r.error_estimate);
  if (out.endpoint_route_discrepancy > budget)
    out.warnings.push_back("eta and defect endpoint routes disagree by " +
                           std::to_string(out.endpoint_route_discrepancy));
  return out;
}

Eta1Result eta1(const Element& d, const QuadratureConfig& quad) {
  require_margin(d, "eta1");
  auto spec = weighted_spectrum(d);
  auto integrand = [&spec](double t) {
    double sum = 0.0;
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
      double l = spec.values[i];
      sum += spec.weights[i] * l * std::exp(-t * l * l);
    }
    return sum / std::sqrt(t);
  };
  auto q = integrate_tail_from_one(integrand, quad);
  if (!q.converged)
    throw NumericalError("eta1: quadrature did not converge (estimate " +
                         std::to_string(q.error_estimate) + ")");
  return Eta1Result{q.value / kSqrtPi, q.error_estimate / kSqrtPi};
}

DefectResult endpoint_defect(const Element& d, const FunctionSpec& chi,
                             const QuadratureConfig& quad) {
  require_margin(d, "endpoint_defect");
  if (!chi.has_derivative())
    throw ValidationError("endpoint_defect: chi needs a derivative for the integral route");
  auto spec = weighted_spectrum(d);

  DefectResult out;
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    double sgn = spec.values[i] >= 0.0 ? 1.0 : -1.0;
    out.direct += spec.weights[i] * (sgn - chi.value(spec.values[i]).real());
  }

  auto integrand = [&spec, &chi](double t) {
    double rt = std::sqrt(t);
    double sum = 0.0;
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
      double l = spec.values[i];
      sum += spec.weights[i] * l * chi.derivative(rt * l).real();
    }
    return sum / rt;
  };
  auto q = integrate_tail_from_one(integrand, quad);
  if (!q.converged)
    throw NumericalError("endpoint_defect: integral route did not converge (estimate " +
                         std::to_string(q.error_estimate) + ")");
  out.integral_route = 0.5 * q.value;
  out.error_estimate = 0.5 * q.error_estimate;
  out.discrepancy = std::abs(out.direct - out.integral_route);
  return out;
}

FormulaResult sf_resolvent_power(const OperatorPath& path, double p, const QuadratureConfig& quad) {
  if (!(p >= 1.0)) throw ValidationError("sf_resolvent_power: p must be >= 1");
  require_invertible(path, "sf_resolvent_power");
  auto chi = NormalizingFunction::chi_p(p);
  double cp = chi.normalization_constant();

  auto resolvent_power = [p](double x) { return std::pow(1.0 + x * x, -0.5 * (p + 1.0)); };
  bool pole_is_zero = p > 1.0;
  auto integrand = [&](double t, Side side) {
    return trace_derivative_weighted(path, t, side, resolvent_power, pole_is_zero,
                                     "sf_resolvent_power");
  };
  auto q = integrate_real(integrand, 0.0, 1.0, quad, path.breakpoints(), 6);
  FormulaResult out;
  if (!q.converged) {
    std::ostringstream os;
    os << "sf_resolvent_power(p = " << p << "): quadrature did not converge (estimate "
       << q.error_estimate << ")";
    throw NumericalError(os.str());
  }
  out.integral_term = q.value / (2.0 * cp);
  out.error_estimate = q.error_estimate / (2.0 * cp);
  out.defect_start = half_defect_of(bounded_transform(path.value(0.0, Side::kRight)), chi);
  out.defect_end = half_defect_of(bounded_transform(path.value(1.0, Side::kLeft)), chi);
  out.value = out.integral_term + out.defect_end - out.defect_start;
  return out;
}

CpConstant cp_constant(double p) {
  if (!(p >= 1.0)) throw ValidationError("cp_constant: p must be >= 1");
  QuadratureConfig cfg;
  cfg.tolerance = 1e-12;
  CpConstant out;
  if (p < 2.0) {
    // y = sin(theta) absorbs the endpoint singularity of (1 - y^2)^{(p-2)/2}
    auto f = [p](double theta, Side) { return std::pow(std::cos(theta), p - 1.0); };
    out.by_quadrature = integrate_real(f, 0.0, 0.5 * kPi, cfg).value;
  } else {
    auto f = [p](double y, Side) { return std::pow(1.0 - y * y, 0.5 * p - 1.0); };
    out.by_quadrature = integrate_real(f, 0.0, 1.0, cfg).value;
  }
  out.by_gamma = kSqrtPi * std::tgamma(0.5 * p) / (2.0 * std::tgamma(0.5 * (p + 1.0)));
  if (std::abs(out.by_quadrature - out.by_gamma) > 1e-10)
    throw NumericalError("cp_constant: quadrature and Gamma identity disagree by " +
                         std::to_string(std::abs(out.by_quadrature - out.by_gamma)));
  return out;
}

}  // namespace specflow
