#include "specflow/index.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace specflow {

namespace {

void check_projection(const Element& p, const char* name) {
  if (!p.hermitian()) throw ValidationError(std::string(name) + ": projection must be Hermitian");
  double dev = distance(p * p, p);
  if (dev > tol::kProjection * (1.0 + operator_norm(p)))
    throw ValidationError(std::string(name) + ": not idempotent (deviation " +
                          std::to_string(dev) + ")");
}

// Orthonormal column basis of the range of a projection block.
Matrix range_basis(const Matrix& proj) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(proj);
  int count = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] > 0.5) ++count;
  Matrix basis(proj.rows(), count);
  int c = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] > 0.5) basis.col(c++) = es.eigenvectors().col(i);
  return basis;
}

}  // namespace

CornerOperator make_corner_operator(Element op, Element target_p, Element source_q) {
  check_projection(target_p, "corner target");
  check_projection(source_q, "corner source");
  Element compressed = target_p * op * source_q;
  double dev = distance(op, compressed);
  if (dev > 1e-12 * std::max(1.0, operator_norm(op)))
    throw ValidationError("corner operator: D != p D q (deviation " + std::to_string(dev) + ")");
  return CornerOperator{std::move(op), std::move(target_p), std::move(source_q)};
}

IndexResult breuer_index(const CornerOperator& t, double tol) {
  IndexResult out;
  const auto& alg = *t.op.algebra();
  if (alg.backend() == TracialAlgebra::Backend::kBlock) {
    for (std::size_t k = 0; k < alg.blocks().size(); ++k) {
      Matrix vp = range_basis(t.target.blocks()[k]);
      Matrix vq = range_basis(t.source.blocks()[k]);
      Matrix m = vp.adjoint() * t.op.blocks()[k] * vq;
      long rank = 0;
      if (m.rows() > 0 && m.cols() > 0) {
        Eigen::JacobiSVD<Matrix> svd(m);
        for (int i = 0; i < svd.singularValues().size(); ++i) {
          double s = svd.singularValues()[i];
          if (s > tol) ++rank;
          if (s > 0.1 * tol && s < 10.0 * tol)
            out.warnings.push_back("ill-conditioned rank decision in block " + std::to_string(k) +
                                   " (sigma = " + std::to_string(s) + ")");
        }
      }
      double w = alg.blocks()[k].weight;
      out.kernel_trace += w * static_cast<double>(m.cols() - rank);
      out.cokernel_trace += w * static_cast<double>(m.rows() - rank);
    }
  } else {
    for (std::size_t i = 0; i < alg.points().size(); ++i) {
      double w = alg.weights()[i];
      bool in_q = t.source.grid_values()[i].real() > 0.5;
      bool in_p = t.target.grid_values()[i].real() > 0.5;
      double s = std::abs(t.op.grid_values()[i]);
      bool null = s <= tol;
      if (s > 0.1 * tol && s < 10.0 * tol)
        out.warnings.push_back("ill-conditioned rank decision at point " + std::to_string(i));
      if (in_q && null) out.kernel_trace += w;
      if (in_p && null) out.cokernel_trace += w;
    }
  }
  out.value = out.kernel_trace - out.cokernel_trace;
  return out;
}

OperatorPath suspension_path(const CornerOperator& t) {
  const auto& alg = *t.op.algebra();

  // Compress to ran q (+) ran p per block; blocks where both ranges vanish
  // contribute nothing and are dropped.
  std::vector<Matrix> compressed;  // the compressed corner map M : ran q -> ran p
  std::vector<BlockSpec> out_blocks;
  std::vector<int> q_dims;
  if (alg.backend() == TracialAlgebra::Backend::kBlock) {
    for (std::size_t k = 0; k < alg.blocks().size(); ++k) {
      Matrix vp = range_basis(t.target.blocks()[k]);
      Matrix vq = range_basis(t.source.blocks()[k]);
      if (vp.cols() + vq.cols() == 0) continue;
      compressed.push_back(vp.adjoint() * t.op.blocks()[k] * vq);
      out_blocks.push_back({static_cast<int>(vp.cols() + vq.cols()), alg.blocks()[k].weight});
      q_dims.push_back(static_cast<int>(vq.cols()));
    }
  } else {
    for (std::size_t i = 0; i < alg.points().size(); ++i) {
      bool in_q = t.source.grid_values()[i].real() > 0.5;
      bool in_p = t.target.grid_values()[i].real() > 0.5;
      if (!in_q && !in_p) continue;
      Matrix m(in_p ? 1 : 0, in_q ? 1 : 0);
      if (in_p && in_q) m(0, 0) = t.op.grid_values()[i];
      compressed.push_back(m);
      out_blocks.push_back({(in_p ? 1 : 0) + (in_q ? 1 : 0), alg.weights()[i]});
      q_dims.push_back(in_q ? 1 : 0);
    }
  }
  if (out_blocks.empty()) out_blocks.push_back({1, 1.0});  // zero corner: trivial block

  AlgebraPtr doubled = make_block_algebra(out_blocks);

  auto assemble = [compressed, q_dims, doubled](double t_par) {
    std::vector<Matrix> blocks;
    if (compressed.empty()) {
      blocks.push_back(Matrix::Constant(1, 1, Complex(0.5, 0.0)));  // inert placeholder
      return Element::trusted(doubled, std::move(blocks), {}, {}, true);
    }
    for (std::size_t k = 0; k < compressed.size(); ++k) {
      const Matrix& m = compressed[k];
      int nq = q_dims[k];
      int np = static_cast<int>(m.rows());
      Matrix b = Matrix::Zero(nq + np, nq + np);
      b.topLeftCorner(nq, nq) = (t_par - 0.5) * Matrix::Identity(nq, nq);
      b.bottomRightCorner(np, np) = (0.5 - t_par) * Matrix::Identity(np, np);
      b.bottomLeftCorner(np, nq) = m;
      b.topRightCorner(nq, np) = m.adjoint();
      blocks.push_back(std::move(b));
    }
    return Element::trusted(doubled, std::move(blocks), {}, {}, true);
  };
  auto deriv = [compressed, q_dims, doubled](double, Side) {
    std::vector<Matrix> blocks;
    if (compressed.empty()) {
      blocks.push_back(Matrix::Zero(1, 1));
      return Element::trusted(doubled, std::move(blocks), {}, {}, true);
    }
    for (std::size_t k = 0; k < compressed.size(); ++k) {
      int nq = q_dims[k];
      int np = static_cast<int>(compressed[k].rows());
      Matrix b = Matrix::Zero(nq + np, nq + np);
      b.topLeftCorner(nq, nq) = Matrix::Identity(nq, nq);
      b.bottomRightCorner(np, np) = -Matrix::Identity(np, np);
      blocks.push_back(std::move(b));
    }
    return Element::trusted(doubled, std::move(blocks), {}, {}, true);
  };

  return OperatorPath(
      doubled, [assemble](double tt, Side) { return assemble(tt); }, deriv, {0.5}, {},
      "suspension");
}

HomotopyReport verify_index_homotopy(const std::function<CornerOperator(double)>& family,
                                     int samples, double tol) {
  if (samples < 2) throw ValidationError("verify_index_homotopy: needs at least two samples");
  HomotopyReport report;
  for (int j = 0; j < samples; ++j) {
    double s = static_cast<double>(j) / (samples - 1);
    auto result = breuer_index(family(s), tol);
    report.indices.push_back(result.value);
    if (!result.warnings.empty()) {
      report.rank_stable = false;
      report.flags.push_back("s = " + std::to_string(s) + ": " + result.warnings.front());
    }
  }
  for (double v : report.indices)
    report.max_deviation = std::max(report.max_deviation, std::abs(v - report.indices.front()));
  if (report.max_deviation > 0.0 && !report.rank_stable)
    report.flags.push_back("index changed across a rank-unstable region");
  return report;
}

}  // namespace specflow
