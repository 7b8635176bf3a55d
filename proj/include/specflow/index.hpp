#pragma once

#include <functional>

#include "specflow/path.hpp"

namespace specflow {

/// An operator D = p D q between the ranges of two projections of the same
/// algebra (source q, target p). Square operators are the case p = q = 1;
/// proper corners make non-integer index values reachable at desk scale.
struct CornerOperator {
  Element op;
  Element target;  // p
  Element source;  // q
};

/// Validates projections (Hermitian idempotent to tol::kProjection) and the
/// corner condition ||D - p D q|| <= 1e-12 ||D||.
CornerOperator make_corner_operator(Element op, Element target_p, Element source_q);

struct IndexResult {
  double value = 0.0;           // kernel_trace - cokernel_trace
  double kernel_trace = 0.0;    // tau of ker D inside ran q
  double cokernel_trace = 0.0;  // tau of ker D* inside ran p
  std::vector<std::string> warnings;
};

/// Weighted kernel-minus-cokernel index, with kernels decided by singular
/// values of the compressed operator below `tol`; singular values within a
/// factor 10 of `tol` are flagged as ill-conditioned rank decisions.
IndexResult breuer_index(const CornerOperator& t, double tol = tol::kKernel);

/// The suspension [[ (t - 1/2) on ran q, D* ], [ D, (1/2 - t) on ran p ]],
/// compressed to ran q (+) ran p so the endpoints are invertible with margin
/// 1/2. Its winding spectral flow equals breuer_index.
OperatorPath suspension_path(const CornerOperator& t);

struct HomotopyReport {
  std::vector<double> indices;
  double max_deviation = 0.0;
  bool rank_stable = true;
  std::vector<std::string> flags;
};

/// Evaluates breuer_index along a samplable family and reports constancy.
/// Rank instability within the tolerance band is flagged, not failed.
HomotopyReport verify_index_homotopy(const std::function<CornerOperator(double)>& family,
                                     int samples, double tol = tol::kKernel);

}  // namespace specflow
