#pragma once

#include <map>
#include <string>
#include <vector>

#include "specflow/path.hpp"
#include "specflow/winding.hpp"

namespace specflow {

struct SfResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::vector<std::string> warnings;
};

/// Spectral flow as the winding number of u(t) = e^{i pi (chi(D_t)+1)}.
/// Requires invertible endpoints and a smooth_gap chi whose gap lies strictly
/// below both endpoint margins, so that chi(D_0), chi(D_1) are involutions
/// and the loop closes at 1. Pole wraps are transparent: chi(+-inf) = +-1
/// keeps u = 1 across a wrap.
SfResult sf_winding(const OperatorPath& path, const NormalizingFunction& chi,
                    const QuadratureConfig& quad);

/// Phillips' analytic spectral flow: sum over consecutive partition points of
/// the index of P_{t_i} P_{t_{i+1}} : ran P_{t_{i+1}} -> ran P_{t_i}, with
/// P_t = 1_{>=0}(D_t) and kernels decided by singular values at
/// tol::kKernel. On grid paths, each annotated wrap between partition points
/// contributes its signed weight; wraps are not zero crossings.
SfResult sf_analytic(const OperatorPath& path, const std::vector<double>& partition);

std::vector<double> uniform_partition(int subintervals);

struct CrossingControl {
  double initial_step = 1e-3;
  double refine_step = 1e-10;
};

/// Independent oracle. Block backend: tau(1_{>=0}(D_1)) - tau(1_{>=0}(D_0)),
/// exact at finite dimension. Grid backend: per point, up-crossings minus
/// down-crossings of t -> f_t(x_i) through 0, located by bisection, with sign
/// changes across pole wraps excluded.
SfResult sf_crossing(const OperatorPath& path, const CrossingControl& control = {});

/// Endpoint regularization for non-invertible endpoints. Q_i is the spectral
/// projection of the affected endpoint onto [-eps, eps]; the returned path is
/// D_t + (1-t) Q_0 + t Q_1, and the corrections are the analytic spectral
/// flows of the connecting segments D_0 + (1-u) Q_0 and D_1 + u Q_1. The
/// total spectral flow of the original path is
///   sf(regularized) - correction_start - correction_end.
struct Regularized {
  OperatorPath path;
  double correction_start = 0.0;
  double correction_end = 0.0;
  double correction_total = 0.0;
  std::vector<std::string> notes;
};
Regularized regularize_endpoints(const OperatorPath& path, double eps);

/// Per-method spectral-flow values with diagnostics; discrepancies are
/// recomputed from the stored values so they can never drift out of sync.
class SpectralFlowReport {
 public:
  void add(const std::string& method, const SfResult& result);
  const std::map<std::string, SfResult>& methods() const { return methods_; }
  std::map<std::string, double> discrepancies() const;  // pairwise |v_i - v_j|
  double max_discrepancy() const;
  void set_corrections(double start, double end);
  double correction_start() const { return correction_start_; }
  double correction_end() const { return correction_end_; }

 private:
  std::map<std::string, SfResult> methods_;
  double correction_start_ = 0.0;
  double correction_end_ = 0.0;
};

}  // namespace specflow
