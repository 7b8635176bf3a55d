#pragma once

#include "specflow/path.hpp"
#include "specflow/spectral_flow.hpp"

namespace specflow {

struct FormulaResult {
  double value = 0.0;
  double integral_term = 0.0;
  double defect_start = 0.0;  // (1/2) tau(2P_0 - 1 - chi(F_0))
  double defect_end = 0.0;    // (1/2) tau(2P_1 - 1 - chi(F_1))
  double error_estimate = 0.0;
  std::vector<std::string> warnings;
};

/// sf = (1/2) int tau((dF/dt) chi'(F_t)) dt + (1/2) tau(2P_1 - 1 - chi(F_1))
///      - (1/2) tau(2P_0 - 1 - chi(F_0)), for a path of bounded Hermitian
/// elements with ||F_t|| <= 1 and invertible endpoints; chi odd, chi(1) = 1,
/// non-decreasing on [-1,1].
FormulaResult sf_integral_chi(const OperatorPath& bounded_path, const NormalizingFunction& chi,
                              const QuadratureConfig& quad);

/// Heat-kernel form: sf = (1/sqrt(pi)) int tau((dD/dt) e^{-D_t^2}) dt plus
/// chi_e endpoint defects. The endpoint terms are computed both as defects of
/// chi_e(F_i) and as (1/2) eta_1(D_i); the two routes must agree within the
/// quadrature tolerance and the discrepancy is recorded.
struct HeatResult : FormulaResult {
  double eta_route_start = 0.0;
  double eta_route_end = 0.0;
  double endpoint_route_discrepancy = 0.0;
};
HeatResult sf_heat(const OperatorPath& path, const QuadratureConfig& quad);

/// Truncated eta invariant eta_1(D) = (1/sqrt(pi)) int_1^inf t^{-1/2}
/// tau(D e^{-t D^2}) dt for invertible Hermitian D.
struct Eta1Result {
  double value = 0.0;
  double error_estimate = 0.0;
};
Eta1Result eta1(const Element& d, const QuadratureConfig& quad);

/// tau(2 P - 1 - chi(D)) for invertible Hermitian D, with chi a normalizing
/// function on the line (pass compose_with_bounded_transform(chi_e) etc.).
/// Also evaluates the integral identity
///   tau(2P - 1 - chi(D)) = (1/2) int_1^inf t^{-1/2} tau(D chi'(sqrt(t) D)) dt
/// and reports the discrepancy between the two routes.
struct DefectResult {
  double direct = 0.0;
  double integral_route = 0.0;
  double discrepancy = 0.0;
  double error_estimate = 0.0;
};
DefectResult endpoint_defect(const Element& d, const FunctionSpec& chi,
                             const QuadratureConfig& quad);

/// Resolvent-power form, p >= 1:
/// sf = (1/2 C_p) int tau((dD/dt)(1 + D_t^2)^{-(p+1)/2}) dt plus chi_p
/// endpoint defects, chi_p(x) = (1/C_p) int_0^x (1 - y^2)^{(p-2)/2} dy.
FormulaResult sf_resolvent_power(const OperatorPath& path, double p, const QuadratureConfig& quad);

/// C_p by adaptive quadrature of its defining integral (with the y = sin
/// theta substitution below p = 2) and by the Gamma-function identity
/// 2 C_p = sqrt(pi) Gamma(p/2) / Gamma((p+1)/2); disagreement beyond 1e-10 is
/// an internal consistency error.
struct CpConstant {
  double by_quadrature = 0.0;
  double by_gamma = 0.0;
};
CpConstant cp_constant(double p);

}  // namespace specflow
