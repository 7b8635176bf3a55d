#pragma once

#include <cstdint>
#include <random>

#include "specflow/index.hpp"
#include "specflow/path.hpp"

namespace specflow {

/// Seeded generators for the property suites. Gaussians come from an explicit
/// Box-Muller on the raw engine so the streams are identical across standard
/// libraries; everything downstream (reports, acceptance runs) is then
/// bit-reproducible from the seed alone.
class RandomSuite {
 public:
  explicit RandomSuite(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi);
  double gaussian();
  int uniform_int(int lo, int hi);  // inclusive

  Matrix random_matrix(int n, double scale = 1.0);
  Matrix random_hermitian(int n, double scale = 1.0);
  Matrix random_unitary(int n);
  /// Rank-r orthogonal projection in dimension n.
  Matrix random_projection(int n, int r);

  AlgebraPtr random_block_algebra(int min_blocks, int max_blocks, int max_total_dim);
  Element random_element(const AlgebraPtr& algebra, double scale = 1.0);
  Element random_hermitian_element(const AlgebraPtr& algebra, double scale = 1.0);
  Element random_unitary_element(const AlgebraPtr& algebra);

  /// Quadratic Hermitian path with both endpoint margins >= min_margin
  /// (resampled until the margins hold).
  OperatorPath random_invertible_path(const AlgebraPtr& algebra, double min_margin);

  /// Corner operator with prescribed rank data in a fresh one-block algebra:
  /// ranks of q and p, the rank of the compressed map, and the block weight.
  CornerOperator random_corner(int dim, int rank_q, int rank_p, int rank_op, double weight);

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace specflow
