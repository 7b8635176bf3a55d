#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <vector>

#include "specflow/errors.hpp"
#include "specflow/functions.hpp"
#include "specflow/quadrature.hpp"
#include "specflow/tolerances.hpp"

namespace specflow {

using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

struct BlockSpec {
  int dim;
  double weight;
};

/// Desk-scale model of a semifinite tracial algebra. Two backends:
///   - block-matrix: a direct sum of full matrix blocks, block k carrying a
///     positive weight c_k; tau(A) = sum_k c_k tr(A_k);
///   - grid: weighted sample points modeling multiplication operators;
///     tau(f) = sum_i w_i f(x_i).
/// Immutable after construction; all operations on elements are pure.
class TracialAlgebra {
 public:
  enum class Backend { kBlock, kGrid };

  Backend backend() const { return backend_; }
  const std::vector<BlockSpec>& blocks() const { return blocks_; }
  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }

  int total_dim() const { return total_dim_; }
  double trace_of_identity() const { return trace_of_identity_; }
  bool same_as(const TracialAlgebra& other) const;

 private:
  friend std::shared_ptr<const TracialAlgebra> make_block_algebra(const std::vector<BlockSpec>&);
  friend std::shared_ptr<const TracialAlgebra> make_grid_algebra(std::vector<double>,
                                                                 std::vector<double>);
  TracialAlgebra() = default;

  Backend backend_ = Backend::kBlock;
  std::vector<BlockSpec> blocks_;
  std::vector<double> points_, weights_;  // grid backend
  int total_dim_ = 0;
  double trace_of_identity_ = 0.0;
};

using AlgebraPtr = std::shared_ptr<const TracialAlgebra>;

AlgebraPtr make_block_algebra(const std::vector<BlockSpec>& blocks);
AlgebraPtr make_grid_algebra(std::vector<double> points, std::vector<double> weights);

/// Marker for extended-real grid samples. Poles model values that escaped to
/// +-infinity along a path; an unsigned pole is the instant of a wrap where
/// the two one-sided limits differ in sign.
enum class Pole : int { kNone = 0, kPlus = 1, kMinus = -1, kUnsigned = 2 };

/// An operator in a TracialAlgebra: per-block complex matrices, or per-point
/// values (complex in general, real when Hermitian, with optional pole
/// markers). Hermitian inputs within tolerance are symmetrized; beyond it the
/// constructor rejects.
class Element {
 public:
  static Element from_blocks(AlgebraPtr algebra, std::vector<Matrix> blocks, bool hermitian);
  static Element from_grid(AlgebraPtr algebra, std::vector<Complex> values, bool hermitian);
  static Element from_grid_extended(AlgebraPtr algebra, std::vector<Complex> values,
                                    std::vector<Pole> poles, bool hermitian);
  static Element zero(const AlgebraPtr& algebra);
  static Element identity(const AlgebraPtr& algebra);
  static Element scalar(const AlgebraPtr& algebra, Complex c);

  const AlgebraPtr& algebra() const { return algebra_; }
  bool hermitian() const { return hermitian_; }
  bool has_pole() const;
  Pole pole_at(std::size_t i) const { return poles_.empty() ? Pole::kNone : poles_[i]; }

  const std::vector<Matrix>& blocks() const { return blocks_; }
  const std::vector<Complex>& grid_values() const { return grid_values_; }

  Element operator+(const Element& rhs) const;
  Element operator-(const Element& rhs) const;
  Element operator-() const;
  Element operator*(const Element& rhs) const;  // block matmul / pointwise
  friend Element operator*(Complex c, const Element& e);
  friend Element operator*(double c, const Element& e) { return Complex(c, 0.0) * e; }
  Element adjoint() const;
  Element inverse() const;  // throws NumericalError when not invertible

  /// Internal constructor for trusted data (no re-validation).
  static Element trusted(AlgebraPtr algebra, std::vector<Matrix> blocks,
                         std::vector<Complex> grid_values, std::vector<Pole> poles,
                         bool hermitian);

  /// Throws NumericalError when the element carries pole markers.
  void require_finite(const char* op) const;

 private:
  Element() = default;

  AlgebraPtr algebra_;
  std::vector<Matrix> blocks_;
  std::vector<Complex> grid_values_;
  std::vector<Pole> poles_;  // empty means all finite
  bool hermitian_ = false;
};

Complex trace(const Element& a);
double trace_norm(const Element& a);  // tau(|A|)
double operator_norm(const Element& a);
double l1_norm(const Element& a);                // ||A|| + tau(|A|)
double lp_norm(const Element& a, double p);      // tau(|A|^p)^{1/p} + ||A||
double smallest_singular_value(const Element& a);
double distance(const Element& a, const Element& b);  // operator norm of a - b

/// Per-block Hermitian eigendecomposition (grid elements expose their values
/// as eigenvalues directly).
struct HermitianEigen {
  std::vector<RealVector> eigenvalues;
  std::vector<Matrix> eigenvectors;
};
HermitianEigen hermitian_eigendecomposition(const Element& a);

/// Functional calculus. Block backend: eigendecompose each Hermitian block,
/// apply f to the eigenvalues, reassemble. Grid backend: apply pointwise,
/// mapping pole markers to the function's limits (domain error when the
/// needed limit is undefined or, for unsigned poles, when the two limits
/// disagree).
Element func_calc(const FunctionSpec& f, const Element& a);

/// F_D = D (1 + D^2)^{-1/2}; poles map to +-1.
Element bounded_transform(const Element& d);

/// Derivative of t -> g(F_t) given F and dF/dt, through the first divided
/// difference rule: in the eigenbasis of F the result has entries
/// g[l_i, l_j] (dF)_{ij} with g[l, l] = g'(l). Eigenvalue gaps below
/// tol::kEigenvalueGap take the derivative branch.
Element derivative_of_function(const FunctionSpec& g, const Element& f, const Element& fdot);

/// Same derivative computed independently through the double quadrature
///   d/dt g(F_t) = int int i l ghat(l) e^{i(1-u) l F} (dF/dt) e^{i u l F} du dl,
/// with ghat the Fourier data of g (supplied in closed form or computed
/// numerically from a compactly supported g). Requires ||F|| <= 1.
struct FourierData {
  std::function<double(double)> ghat;  // real, even is typical
  double support_radius = 0.0;         // 0 = unknown; used only for diagnostics
};
Element duhamel_derivative(const FunctionSpec& g, const FourierData& ghat, const Element& f,
                           const Element& fdot, const QuadratureConfig& quad);

/// Numerical Fourier transform of a compactly supported g, with the
/// convention g(x) = int ghat(l) e^{i l x} dl.
FourierData fourier_data_of(const FunctionSpec& g, double support_radius,
                            const QuadratureConfig& quad);

}  // namespace specflow
