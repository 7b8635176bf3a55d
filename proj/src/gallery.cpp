#include "specflow/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace specflow {

namespace {

double frac(double x) { return x - std::floor(x); }

}  // namespace

OperatorPath build_tan_wrap_loop(const AlgebraPtr& grid, double offset) {
  if (!grid || grid->backend() != TracialAlgebra::Backend::kGrid)
    throw ValidationError("tan_wrap: needs a grid algebra");
  const auto& pts = grid->points();

  // Endpoint check: t - x - offset must avoid Z/2 at t = 0 (= t = 1).
  for (double x : pts) {
    double phase = frac(-x - offset);  // in [0,1)
    double d_zero = std::min(phase, 1.0 - phase);
    double d_pole = std::abs(phase - 0.5);
    if (d_zero < 1e-6 || d_pole < 1e-6) {
      std::ostringstream os;
      os << "tan_wrap: endpoint value at sample x = " << x
         << " sits on a zero or pole of tan; choose a different offset (phase " << phase << ")";
      throw ValidationError(os.str());
    }
  }

  std::vector<std::vector<PoleWrap>> wraps(pts.size());
  std::vector<double> breakpoints;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double t_zero = frac(pts[i] + offset);
    double t_pole = frac(pts[i] + offset + 0.5);
    if (t_pole > 0.0 && t_pole < 1.0) wraps[i].push_back({t_pole, +1});  // tan increases
    if (t_pole > 0.0 && t_pole < 1.0) breakpoints.push_back(t_pole);
    if (t_zero > 0.0 && t_zero < 1.0) breakpoints.push_back(t_zero);  // quadrature hint
  }

  auto value = [grid, pts, offset](double t, Side side) {
    std::vector<Complex> values(pts.size());
    std::vector<Pole> poles(pts.size(), Pole::kNone);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double arg = t - pts[i] - offset;
      double d_pole = std::abs(frac(arg) - 0.5);
      if (d_pole < 1e-13) {
        // exactly on the wrap: the one-sided limits differ in sign
        poles[i] = side == Side::kLeft ? Pole::kPlus
                                       : (side == Side::kRight ? Pole::kMinus : Pole::kUnsigned);
        continue;
      }
      values[i] = Complex(std::tan(kPi * arg), 0.0);
    }
    return Element::from_grid_extended(grid, std::move(values), std::move(poles), true);
  };
  auto deriv = [grid, pts, offset](double t, Side) {
    std::vector<Complex> values(pts.size());
    std::vector<Pole> poles(pts.size(), Pole::kNone);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double arg = t - pts[i] - offset;
      double d_pole = std::abs(frac(arg) - 0.5);
      if (d_pole < 1e-13) {
        poles[i] = Pole::kPlus;  // pi (1 + tan^2) runs to +inf from both sides
        continue;
      }
      double f = std::tan(kPi * arg);
      values[i] = Complex(kPi * (1.0 + f * f), 0.0);
    }
    return Element::from_grid_extended(grid, std::move(values), std::move(poles), true);
  };

  return OperatorPath(grid, value, deriv, std::move(breakpoints), std::move(wraps), "tan_wrap");
}

CoveringModel build_covering_path(const CoveringSpec& spec) {
  const int m = spec.base_length;
  const int k = spec.deck_order;
  if (m < 3) throw ValidationError("covering: base cycle length must be >= 3");
  if (k < 1) throw ValidationError("covering: deck order must be >= 1");
  if (!spec.edge_weight || !spec.potential)
    throw ValidationError("covering: edge weights and potentials are required");
  const int n = m * k;

  auto potential_at = [&spec, m](int v, double t) {
    if (spec.cover_potential_override) return (*spec.cover_potential_override)[v](t);
    return spec.potential(v % m, t);
  };
  if (spec.cover_potential_override &&
      static_cast<int>(spec.cover_potential_override->size()) != n)
    throw ValidationError("covering: potential override must list every cover vertex");

  auto assemble = [&spec, potential_at, m, n](double t, bool derivative) {
    Matrix d = Matrix::Zero(n, n);
    for (int v = 0; v < n; ++v) {
      int w = (v + 1) % n;
      double a = derivative ? (spec.edge_weight_dt ? spec.edge_weight_dt(v % m, t) : 0.0)
                            : spec.edge_weight(v % m, t);
      d(v, v) += a;
      d(w, w) += a;
      d(v, w) -= a;
      d(w, v) -= a;
    }
    for (int v = 0; v < n; ++v) {
      if (derivative) {
        if (spec.cover_potential_override) {
          // finite difference on the override (no derivative callable given)
          double h = 1e-6;
          d(v, v) += (potential_at(v, std::min(t + h, 1.0)) - potential_at(v, std::max(t - h, 0.0))) /
                     (std::min(t + h, 1.0) - std::max(t - h, 0.0));
        } else if (spec.potential_dt) {
          d(v, v) += spec.potential_dt(v % m, t);
        }
      } else {
        d(v, v) += potential_at(v, t);
      }
    }
    return d;
  };

  // Equivariance: the operator must commute with rotation by m.
  double residual = 0.0;
  for (double t : {0.0, 0.37, 1.0}) {
    Matrix d = assemble(t, false);
    Matrix rotated(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) rotated((i + m) % n, (j + m) % n) = d(i, j);
    residual = std::max(residual, (rotated - d).cwiseAbs().maxCoeff());
  }
  if (residual > 1e-12)
    throw ValidationError("covering: operator is not deck-equivariant (residual " +
                          std::to_string(residual) + ")");

  AlgebraPtr gamma = make_block_algebra({{n, 1.0 / k}});
  AlgebraPtr full = make_block_algebra({{n, 1.0}});
  auto path_on = [assemble](AlgebraPtr alg) {
    auto value = [assemble, alg](double t, Side) {
      return Element::trusted(alg, {assemble(t, false)}, {}, {}, true);
    };
    auto deriv = [assemble, alg](double t, Side) {
      return Element::trusted(alg, {assemble(t, true)}, {}, {}, true);
    };
    return OperatorPath(alg, value, deriv, {}, {}, "covering");
  };
  return CoveringModel{path_on(gamma), path_on(full), gamma, full, residual};
}

double ginf_value(double x) {
  double ax = std::abs(x);
  if (ax == 0.0 || ax > 1.0) return 0.0;
  double j = std::floor(1.0 / ax);
  long jl = static_cast<long>(j);
  // band (1/(2k+1), 1/(2k)] has floor(1/|x|) = 2k and value +k;
  // band (1/(2k),   1/(2k-1)] has floor(1/|x|) = 2k-1 and value -k.
  if (jl % 2 == 0) return static_cast<double>(jl / 2);
  return -static_cast<double>((jl + 1) / 2);
}

double gn_value(int n, double x) {
  if (n <= 0) return ginf_value(x);
  double ax = std::abs(x);
  if (ax == 0.0 || ax > 1.0) return 0.0;
  if (ax <= 1.0 / n) return static_cast<double>(n);
  return ginf_value(x);
}

GnReport build_gn_family(const std::vector<int>& n_values, int band_depth) {
  if (n_values.empty()) throw ValidationError("gn family: needs at least one n");
  int max_n = *std::max_element(n_values.begin(), n_values.end());
  if (max_n < 1) throw ValidationError("gn family: n values must be >= 1");
  if (band_depth <= 0) band_depth = 2 * max_n + 2;

  // A negative band entirely below 1/n exists among the sampled bands only
  // when the depth reaches k >= (n+1)/2; anything less cannot resolve the
  // oscillation of g_inf against the plateau of g_n.
  for (int n : n_values) {
    int needed = (n + 1) / 2 + 1;
    if (band_depth < needed)
      throw ValidationError("gn family: band depth " + std::to_string(band_depth) +
                            " cannot resolve the oscillation scale of n = " + std::to_string(n) +
                            " (need >= " + std::to_string(needed) + ")");
  }

  // Band midpoints of (1/(2k+1), 1/(2k)] and (1/(2k), 1/(2k-1)] for
  // k = 1..band_depth, mirrored, plus a few points beyond |x| = 1.
  std::set<double> pts;
  for (int k = 1; k <= band_depth; ++k) {
    double pos_mid = 0.5 * (1.0 / (2.0 * k + 1.0) + 1.0 / (2.0 * k));
    double neg_mid = 0.5 * (1.0 / (2.0 * k) + 1.0 / (2.0 * k - 1.0));
    for (double v : {pos_mid, neg_mid}) {
      pts.insert(v);
      pts.insert(-v);
    }
  }
  for (double v : {1.25, 1.5, 2.0}) {
    pts.insert(v);
    pts.insert(-v);
  }
  std::vector<double> points(pts.begin(), pts.end());
  std::vector<double> weights(points.size(), 1.0);
  // measure weights: half-distance to the neighboring samples
  for (std::size_t i = 0; i < points.size(); ++i) {
    double left = i == 0 ? 0.0 : 0.5 * (points[i] - points[i - 1]);
    double right = i + 1 == points.size() ? 0.0 : 0.5 * (points[i + 1] - points[i]);
    weights[i] = std::max(left + right, 1e-6);
  }
  AlgebraPtr grid = make_grid_algebra(points, weights);

  auto sample = [&](int n) {
    std::vector<Complex> v(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) v[i] = Complex(gn_value(n, points[i]), 0.0);
    return Element::from_grid(grid, v, true);
  };
  Element g_inf = sample(0);
  auto resolvent = FunctionSpec::from_complex(
      "resolvent_at_i", [](double x) { return 1.0 / Complex(x, 1.0); }, {}, Complex(0.0, 0.0),
      Complex(0.0, 0.0));
  auto bt = FunctionSpec::bounded_transform();
  std::vector<Complex> indicator(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    indicator[i] = std::abs(points[i]) <= 1.0 ? 1.0 : 0.0;
  Element cutoff = Element::from_grid(grid, indicator, true);

  Element res_inf = func_calc(resolvent, g_inf);
  Element bt_inf = func_calc(bt, g_inf);

  GnReport report;
  report.band_depth = band_depth;
  report.grid = grid;
  for (int n : n_values) {
    Element g = sample(n);
    double res_dist = operator_norm(func_calc(resolvent, g) - res_inf);
    double fc_dist = operator_norm((func_calc(bt, g) - bt_inf) * cutoff);
    report.entries.push_back({n, res_dist, fc_dist});
  }
  return report;
}

}  // namespace specflow
