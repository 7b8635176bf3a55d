#include "specflow/spectral_flow.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace specflow {

namespace {

void require_invertible_endpoints(const OperatorPath& path, const char* who) {
  auto start = path.endpoint_start();
  auto end = path.endpoint_end();
  if (!start.invertible || !end.invertible) {
    std::ostringstream os;
    os << who << ": endpoint not invertible (margins " << start.margin << ", " << end.margin
       << "); regularize_endpoints first";
    throw NumericalError(os.str());
  }
}

}  // namespace

SfResult sf_winding(const OperatorPath& path, const NormalizingFunction& chi,
                    const QuadratureConfig& quad) {
  if (chi.kind() != NormalizingFunction::Kind::kSmoothGap)
    throw ValidationError("sf_winding: chi must be a smooth_gap normalizing function");
  require_invertible_endpoints(path, "sf_winding");
  auto start = path.endpoint_start();
  auto end = path.endpoint_end();
  if (!(chi.gap() < start.margin) || !(chi.gap() < end.margin)) {
    std::ostringstream os;
    os << "sf_winding: gap " << chi.gap() << " must lie strictly below the endpoint margins ("
       << start.margin << ", " << end.margin << ")";
    throw ValidationError(os.str());
  }

  FunctionSpec phase = FunctionSpec::winding_phase(chi);
  InvertibleLoop loop;
  loop.a = 0.0;
  loop.b = 1.0;
  loop.closed = true;  // chi is an involution at both endpoints, so u = 1 there
  loop.breakpoints = path.breakpoints();
  loop.value = [path, phase](double t, Side side) { return func_calc(phase, path.value(t, side)); };
  loop.derivative = [path, phase](double t, Side side) {
    return derivative_of_function(phase, path.value(t, side), path.derivative(t, side));
  };

  WindingResult w = winding_number(loop, quad);
  SfResult out;
  out.value = w.value;
  out.error_estimate = w.error_estimate;
  out.warnings = w.warnings;
  return out;
}

std::vector<double> uniform_partition(int subintervals) {
  if (subintervals < 1) throw ValidationError("partition: needs at least one subinterval");
  std::vector<double> t(subintervals + 1);
  for (int i = 0; i <= subintervals; ++i) t[i] = static_cast<double>(i) / subintervals;
  return t;
}

namespace {

// Orthonormal basis of ran 1_{>=0}(block) from its eigendecomposition.
Matrix nonnegative_eigenbasis(const Matrix& block) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(block);
  if (es.info() != Eigen::Success) throw NumericalError("sf_analytic: eigendecomposition failed");
  int count = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] >= 0.0) ++count;
  Matrix basis(block.rows(), count);
  int c = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] >= 0.0) basis.col(c++) = es.eigenvectors().col(i);
  return basis;
}

// Weighted index of P Q : ran Q -> ran P via singular values of the
// compressed product.
double projection_pair_index(const std::vector<Matrix>& p_bases,
                             const std::vector<Matrix>& q_bases,
                             const std::vector<BlockSpec>& specs,
                             std::vector<std::string>* warnings) {
  double index = 0.0;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const Matrix m = p_bases[k].adjoint() * q_bases[k];
    long rank = 0;
    if (m.rows() > 0 && m.cols() > 0) {
      Eigen::JacobiSVD<Matrix> svd(m);
      for (int i = 0; i < svd.singularValues().size(); ++i) {
        double s = svd.singularValues()[i];
        if (s > tol::kKernel) ++rank;
        if (warnings && s > tol::kKernel * 0.1 && s < tol::kKernel * 10.0)
          warnings->push_back("rank decision within a factor 10 of tolerance (sigma = " +
                              std::to_string(s) + ")");
      }
    }
    double kernel = static_cast<double>(m.cols() - rank);
    double cokernel = static_cast<double>(m.rows() - rank);
    index += specs[k].weight * (kernel - cokernel);
  }
  return index;
}

}  // namespace

namespace {

// The Phillips sum itself; endpoint invertibility is checked by the public
// entry point but not for regularization connecting segments, which end at
// the non-invertible endpoint by construction.
SfResult analytic_flow(const OperatorPath& path, const std::vector<double>& partition) {
  if (partition.size() < 2 || partition.front() != 0.0 || partition.back() != 1.0)
    throw ValidationError("sf_analytic: partition must run from 0 to 1");
  for (std::size_t i = 1; i < partition.size(); ++i)
    if (!(partition[i] > partition[i - 1]))
      throw ValidationError("sf_analytic: partition must be strictly increasing");

  SfResult out;
  const auto& alg = *path.algebra();

  if (alg.backend() == TracialAlgebra::Backend::kBlock) {
    std::vector<Matrix> prev;
    for (std::size_t j = 0; j < partition.size(); ++j) {
      Element d = path.value(partition[j], j == 0 ? Side::kRight : Side::kLeft);
      std::vector<Matrix> bases;
      bases.reserve(d.blocks().size());
      for (const auto& b : d.blocks()) bases.push_back(nonnegative_eigenbasis(b));
      if (j > 0) out.value += projection_pair_index(prev, bases, alg.blocks(), &out.warnings);
      prev = std::move(bases);
    }
    return out;
  }

  // Grid backend: per-point telescoping of 1_{>=0} plus signed wrap weights.
  const auto& weights = alg.weights();
  std::vector<double> prev_step(weights.size());
  for (std::size_t j = 0; j < partition.size(); ++j) {
    Element d = path.value(partition[j], j == 0 ? Side::kRight : Side::kLeft);
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (d.pole_at(i) == Pole::kUnsigned)
        throw NumericalError("sf_analytic: partition point t = " + std::to_string(partition[j]) +
                             " coincides with a pole; perturb the partition");
      double step;
      if (d.pole_at(i) == Pole::kPlus)
        step = 1.0;
      else if (d.pole_at(i) == Pole::kMinus)
        step = 0.0;
      else
        step = d.grid_values()[i].real() >= 0.0 ? 1.0 : 0.0;
      if (j > 0) out.value += weights[i] * (step - prev_step[i]);
      prev_step[i] = step;
    }
  }
  if (path.has_wraps()) {
    for (std::size_t i = 0; i < path.wraps().size(); ++i)
      for (const auto& w : path.wraps()[i])
        if (w.t > 0.0 && w.t < 1.0) out.value += weights[i] * w.direction;
  }
  return out;
}

}  // namespace

SfResult sf_analytic(const OperatorPath& path, const std::vector<double>& partition) {
  require_invertible_endpoints(path, "sf_analytic");
  return analytic_flow(path, partition);
}

namespace {

struct PointCrossings {
  double net = 0.0;
  bool tangential_flag = false;
};

// Count signed zero crossings of a scalar sample path by bisection; intervals
// containing an annotated wrap are skipped (a wrap is not a zero crossing).
PointCrossings count_crossings(const std::function<double(double)>& f,
                               const std::vector<PoleWrap>& wraps, const CrossingControl& ctl) {
  PointCrossings out;
  int steps = std::max(2, static_cast<int>(std::ceil(1.0 / ctl.initial_step)));
  auto contains_wrap = [&wraps](double lo, double hi) {
    for (const auto& w : wraps)
      if (w.t > lo && w.t <= hi) return true;
    return false;
  };
  double t_prev = 0.0;
  double f_prev = f(t_prev);
  for (int j = 1; j <= steps; ++j) {
    double t = static_cast<double>(j) / steps;
    double fv = f(t);
    if (!contains_wrap(t_prev, t)) {
      if (f_prev == 0.0) {
        // tangency test around an exact zero sample
        double h = std::max(ctl.refine_step, 1e-7);
        double before = t_prev - h >= 0.0 ? f(t_prev - h) : f_prev;
        double after = f(std::min(t_prev + h, 1.0));
        if (before < 0.0 && after > 0.0)
          out.net += 1.0;
        else if (before > 0.0 && after < 0.0)
          out.net -= 1.0;
        else
          out.tangential_flag = true;
      } else if (f_prev * fv < 0.0) {
        double lo = t_prev, hi = t, flo = f_prev;
        while (hi - lo > ctl.refine_step) {
          double mid = 0.5 * (lo + hi);
          double fm = f(mid);
          if (fm == 0.0) break;
          if (flo * fm < 0.0) {
            hi = mid;
          } else {
            lo = mid;
            flo = fm;
          }
        }
        out.net += f_prev < 0.0 ? 1.0 : -1.0;
      }
    }
    t_prev = t;
    f_prev = fv;
  }
  return out;
}

}  // namespace

SfResult sf_crossing(const OperatorPath& path, const CrossingControl& control) {
  require_invertible_endpoints(path, "sf_crossing");
  SfResult out;
  const auto& alg = *path.algebra();

  if (alg.backend() == TracialAlgebra::Backend::kBlock) {
    // tau(1_{>=0}(D_1)) - tau(1_{>=0}(D_0)) through weighted eigenvalue
    // counts; integer counts keep the difference exact under scaling
    auto count_nonnegative = [](const Element& d) {
      auto eig = hermitian_eigendecomposition(d);
      std::vector<long> counts;
      for (const auto& vals : eig.eigenvalues) {
        long c = 0;
        for (int i = 0; i < vals.size(); ++i)
          if (vals[i] >= 0.0) ++c;
        counts.push_back(c);
      }
      return counts;
    };
    auto c1 = count_nonnegative(path.value(1.0, Side::kLeft));
    auto c0 = count_nonnegative(path.value(0.0, Side::kRight));
    for (std::size_t k = 0; k < alg.blocks().size(); ++k)
      out.value += alg.blocks()[k].weight * static_cast<double>(c1[k] - c0[k]);
    return out;
  }

  const auto& weights = alg.weights();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    auto sample = [&path, i](double t) -> double {
      Element e = path.value(t, Side::kInterior);
      if (e.pole_at(i) != Pole::kNone) return std::numeric_limits<double>::infinity();
      return e.grid_values()[i].real();
    };
    const std::vector<PoleWrap> empty;
    const auto& wraps = path.wraps().empty() ? empty : path.wraps()[i];
    auto counted = count_crossings(sample, wraps, control);
    out.value += weights[i] * counted.net;
    if (counted.tangential_flag)
      out.warnings.push_back("tangential zero at sample point " + std::to_string(i) +
                             " counted as 0");
  }
  return out;
}

namespace {

// Spectral projection onto [-eps, eps] of an endpoint value; errors when eps
// fails to separate 0 from the rest of the spectrum.
Element kernel_window_projection(const Element& d, double eps) {
  auto eig = hermitian_eigendecomposition(d);
  for (const auto& vals : eig.eigenvalues)
    for (int i = 0; i < vals.size(); ++i) {
      double a = std::abs(vals[i]);
      if (a > tol::kKernel && a <= eps)
        throw ValidationError("regularize_endpoints: eps = " + std::to_string(eps) +
                              " does not separate 0 from eigenvalue " + std::to_string(vals[i]));
    }
  auto window = FunctionSpec::from_real(
      "kernel_window", [eps](double x) { return std::abs(x) <= eps ? 1.0 : 0.0; }, {}, 0.0, 0.0);
  return func_calc(window, d);
}

}  // namespace

Regularized regularize_endpoints(const OperatorPath& path, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("regularize_endpoints: eps must be in (0,1)");
  auto start = path.endpoint_start();
  auto end = path.endpoint_end();

  Element d0 = path.value(0.0, Side::kRight);
  Element d1 = path.value(1.0, Side::kLeft);
  Element q0 = start.invertible ? Element::zero(path.algebra()) : kernel_window_projection(d0, eps);
  Element q1 = end.invertible ? Element::zero(path.algebra()) : kernel_window_projection(d1, eps);

  Regularized out{path, 0.0, 0.0, 0.0, {}};
  if (start.invertible && end.invertible) {
    out.notes.push_back("endpoints already invertible; path returned unchanged");
    return out;
  }

  auto value = [path, q0, q1](double t, Side side) {
    return path.value(t, side) + (1.0 - t) * q0 + t * q1;
  };
  auto deriv = [path, q0, q1](double t, Side side) {
    return path.derivative(t, side) - q0 + q1;
  };
  out.path = OperatorPath(path.algebra(), value, deriv, path.breakpoints(), path.wraps(),
                          path.provenance() + ":regularized");

  auto partition = uniform_partition(16);
  if (!start.invertible) {
    OperatorPath segment(path.algebra(),
                         [d0, q0](double u, Side) { return d0 + (1.0 - u) * q0; },
                         [q0](double, Side) { return -q0; }, {}, {}, "regularization_segment");
    out.correction_start = analytic_flow(segment, partition).value;
    out.notes.push_back("start endpoint regularized (margin " + std::to_string(start.margin) + ")");
  }
  if (!end.invertible) {
    OperatorPath segment(path.algebra(), [d1, q1](double u, Side) { return d1 + u * q1; },
                         [q1](double, Side) { return q1; }, {}, {}, "regularization_segment");
    out.correction_end = analytic_flow(segment, partition).value;
    out.notes.push_back("end endpoint regularized (margin " + std::to_string(end.margin) + ")");
  }
  out.correction_total = out.correction_start + out.correction_end;
  return out;
}

void SpectralFlowReport::add(const std::string& method, const SfResult& result) {
  methods_[method] = result;
}

std::map<std::string, double> SpectralFlowReport::discrepancies() const {
  std::map<std::string, double> out;
  for (auto i = methods_.begin(); i != methods_.end(); ++i) {
    for (auto j = std::next(i); j != methods_.end(); ++j) {
      out[i->first + "_vs_" + j->first] = std::abs(i->second.value - j->second.value);
    }
  }
  return out;
}

double SpectralFlowReport::max_discrepancy() const {
  double m = 0.0;
  for (const auto& [name, d] : discrepancies()) m = std::max(m, d);
  return m;
}

void SpectralFlowReport::set_corrections(double start, double end) {
  correction_start_ = start;
  correction_end_ = end;
}

}  // namespace specflow
