#pragma once

#include <optional>

#include "specflow/path.hpp"

namespace specflow {

/// The loop f_t(x) = tan(pi (t - x - offset)) on a grid algebra: every sample
/// point crosses 0 upward exactly once per period and wraps through +-inf
/// once, so the spectral flow equals the total grid weight while the
/// endpoint-projection telescoping value is 0. Pole wraps are annotated;
/// wrap and zero-crossing parameters are declared as breakpoints. Errors when
/// an endpoint sits on a zero or a pole (suggesting a different offset).
OperatorPath build_tan_wrap_loop(const AlgebraPtr& grid, double offset);

/// A k-fold cyclic covering of a weighted cycle of length m: edge weights and
/// vertex potentials are functions on the base, lifted periodically, so the
/// covering operator L_t + V_t commutes with rotation by m. An explicit
/// per-cover-vertex potential override is accepted but must itself be
/// equivariant to 1e-12.
struct CoveringSpec {
  int base_length = 3;  // m >= 3
  int deck_order = 1;   // k >= 1 (deck group Z/kZ)
  std::function<double(int, double)> edge_weight;     // a_j(t), j in [0, m)
  std::function<double(int, double)> edge_weight_dt;  // da_j/dt
  std::function<double(int, double)> potential;       // v_j(t)
  std::function<double(int, double)> potential_dt;    // dv_j/dt
  // Optional explicit potential on the covering vertices (tests the
  // equivariance check); indexed by cover vertex.
  std::optional<std::vector<std::function<double(double)>>> cover_potential_override;
};

struct CoveringModel {
  OperatorPath path_gamma;  // same matrices, Gamma-trace algebra (weight 1/k)
  OperatorPath path_full;   // full-trace algebra (weight 1)
  AlgebraPtr gamma_algebra;
  AlgebraPtr full_algebra;
  double equivariance_residual = 0.0;
};

/// Builds the covering operator path twice: over the Gamma-trace algebra
/// (single block of dimension m*k, weight 1/k — the fundamental-domain trace)
/// and over the full-trace algebra (weight 1), so both spectral flows can be
/// computed independently and compared (ratio 1/k).
CoveringModel build_covering_path(const CoveringSpec& spec);

/// The step-function family g_n: g_n(x) = n on 0 < |x| <= 1/n, and on
/// |x| > 1/n it takes the value +k on (1/(2k+1), 1/(2k)] and -k on
/// (1/(2k), 1/(2k-1)], 0 outside [-1, 1] \ {0}; g_inf is the pointwise limit.
double gn_value(int n, double x);   // n <= 0 means g_inf
double ginf_value(double x);

struct GnReport {
  struct Entry {
    int n;
    double resolvent_distance;  // sup |(g_n + i)^{-1} - (g_inf + i)^{-1}|
    double fc_distance;         // sup |(f(g_n) - f(g_inf)) 1_{[-1,1]}|, f the bounded transform
  };
  std::vector<Entry> entries;
  int band_depth = 0;
  AlgebraPtr grid;
};

/// Samples the g_n family on a grid refined to resolve the oscillation bands
/// (midpoints of every band down to index `band_depth`; 0 picks
/// 2*max(n_values)+2, which reaches below 1/(4 max n)). The resolvent
/// distances must decrease toward 0 with n while the functional-calculus
/// distances stay >= 0.5. Errors when the refinement cannot resolve the
/// oscillation scale of the largest requested n.
GnReport build_gn_family(const std::vector<int>& n_values, int band_depth = 0);

}  // namespace specflow
