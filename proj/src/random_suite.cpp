#include "specflow/random_suite.hpp"

#include <Eigen/QR>
#include <cmath>

namespace specflow {

double RandomSuite::uniform(double lo, double hi) {
  // 53-bit mantissa from the raw engine; avoids distribution differences
  double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

double RandomSuite::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  while (u1 <= 1e-300) u1 = uniform(0.0, 1.0);
  double u2 = uniform(0.0, 1.0);
  double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * kPi * u2);
  have_spare_ = true;
  return r * std::cos(2.0 * kPi * u2);
}

int RandomSuite::uniform_int(int lo, int hi) {
  return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
}

Matrix RandomSuite::random_matrix(int n, double scale) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = scale * Complex(gaussian(), gaussian());
  return m;
}

Matrix RandomSuite::random_hermitian(int n, double scale) {
  Matrix m = random_matrix(n, scale);
  return 0.5 * (m + m.adjoint().eval());
}

Matrix RandomSuite::random_unitary(int n) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(n));
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    Complex d = r(i, i);
    q.col(i) *= d / std::abs(d);
  }
  return q;
}

Matrix RandomSuite::random_projection(int n, int r) {
  if (r == 0) return Matrix::Zero(n, n);
  Matrix u = random_unitary(n).leftCols(r);
  Matrix p = u * u.adjoint();
  return 0.5 * (p + p.adjoint().eval());
}

AlgebraPtr RandomSuite::random_block_algebra(int min_blocks, int max_blocks, int max_total_dim) {
  int nblocks = uniform_int(min_blocks, max_blocks);
  std::vector<BlockSpec> blocks;
  int remaining = max_total_dim - nblocks;  // each block needs at least 1
  for (int k = 0; k < nblocks; ++k) {
    int extra = uniform_int(0, std::max(0, std::min(remaining, 5)));
    remaining -= extra;
    blocks.push_back({1 + extra, uniform(0.1, 3.0)});
  }
  return make_block_algebra(blocks);
}

Element RandomSuite::random_element(const AlgebraPtr& algebra, double scale) {
  if (algebra->backend() == TracialAlgebra::Backend::kBlock) {
    std::vector<Matrix> blocks;
    for (const auto& b : algebra->blocks()) blocks.push_back(random_matrix(b.dim, scale));
    return Element::from_blocks(algebra, std::move(blocks), false);
  }
  std::vector<Complex> values(algebra->points().size());
  for (auto& v : values) v = scale * Complex(gaussian(), gaussian());
  return Element::from_grid(algebra, std::move(values), false);
}

Element RandomSuite::random_hermitian_element(const AlgebraPtr& algebra, double scale) {
  if (algebra->backend() == TracialAlgebra::Backend::kBlock) {
    std::vector<Matrix> blocks;
    for (const auto& b : algebra->blocks()) blocks.push_back(random_hermitian(b.dim, scale));
    return Element::from_blocks(algebra, std::move(blocks), true);
  }
  std::vector<Complex> values(algebra->points().size());
  for (auto& v : values) v = Complex(scale * gaussian(), 0.0);
  return Element::from_grid(algebra, std::move(values), true);
}

Element RandomSuite::random_unitary_element(const AlgebraPtr& algebra) {
  if (algebra->backend() == TracialAlgebra::Backend::kBlock) {
    std::vector<Matrix> blocks;
    for (const auto& b : algebra->blocks()) blocks.push_back(random_unitary(b.dim));
    return Element::from_blocks(algebra, std::move(blocks), false);
  }
  std::vector<Complex> values(algebra->points().size());
  for (auto& v : values) {
    double phi = uniform(0.0, 2.0 * kPi);
    v = Complex(std::cos(phi), std::sin(phi));
  }
  return Element::from_grid(algebra, std::move(values), false);
}

OperatorPath RandomSuite::random_invertible_path(const AlgebraPtr& algebra, double min_margin) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    Element a = random_hermitian_element(algebra);
    Element b = random_hermitian_element(algebra);
    Element c = random_hermitian_element(algebra, 0.7);
    OperatorPath path = make_quadratic_path(a, b, c);
    if (path.endpoint_start().margin >= min_margin && path.endpoint_end().margin >= min_margin)
      return path;
  }
  throw NumericalError("random_invertible_path: could not reach the requested endpoint margin");
}

CornerOperator RandomSuite::random_corner(int dim, int rank_q, int rank_p, int rank_op,
                                          double weight) {
  if (rank_q + rank_p > 2 * dim || rank_q > dim || rank_p > dim)
    throw ValidationError("random_corner: ranks exceed the dimension");
  rank_op = std::min({rank_op, rank_q, rank_p});
  AlgebraPtr algebra = make_block_algebra({{dim, weight}});
  Matrix uq = rank_q > 0 ? Matrix(random_unitary(dim).leftCols(rank_q)) : Matrix::Zero(dim, 0);
  Matrix up = rank_p > 0 ? Matrix(random_unitary(dim).leftCols(rank_p)) : Matrix::Zero(dim, 0);
  Matrix q = uq * uq.adjoint();
  Matrix p = up * up.adjoint();
  Matrix g = Matrix::Zero(rank_p, rank_q);
  for (int i = 0; i < rank_op; ++i) g(i, i) = Complex(uniform(0.5, 2.0), 0.0);
  if (rank_op > 0) {
    // scramble so the kernel is not axis-aligned
    g = (rank_p > 0 ? random_unitary(rank_p) : Matrix::Identity(0, 0)) * g *
        (rank_q > 0 ? random_unitary(rank_q) : Matrix::Identity(0, 0));
  }
  Matrix d = up * g * uq.adjoint();
  return make_corner_operator(Element::from_blocks(algebra, {d}, false),
                              Element::from_blocks(algebra, {0.5 * (p + p.adjoint().eval())}, true),
                              Element::from_blocks(algebra, {0.5 * (q + q.adjoint().eval())}, true));
}

}  // namespace specflow
