#include "specflow/algebra.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace specflow {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void check_algebras(const Element& a, const Element& b, const char* op) {
  if (a.algebra() == b.algebra()) return;
  if (!a.algebra() || !b.algebra() || !a.algebra()->same_as(*b.algebra()))
    throw ValidationError(std::string(op) + ": elements belong to different algebras");
}

Pole combine_add(Pole a, Pole b) {
  if (a == Pole::kNone) return b;
  if (b == Pole::kNone) return a;
  if (a == Pole::kUnsigned || b == Pole::kUnsigned)
    throw NumericalError("arithmetic with an unsigned pole marker is undefined");
  if (a != b) throw NumericalError("adding poles of opposite sign is undefined");
  return a;
}

}  // namespace

bool TracialAlgebra::same_as(const TracialAlgebra& other) const {
  if (backend_ != other.backend_) return false;
  if (backend_ == Backend::kBlock) {
    if (blocks_.size() != other.blocks_.size()) return false;
    for (std::size_t k = 0; k < blocks_.size(); ++k)
      if (blocks_[k].dim != other.blocks_[k].dim || blocks_[k].weight != other.blocks_[k].weight)
        return false;
    return true;
  }
  return points_ == other.points_ && weights_ == other.weights_;
}

AlgebraPtr make_block_algebra(const std::vector<BlockSpec>& blocks) {
  if (blocks.empty()) throw ValidationError("block algebra: needs at least one block");
  auto alg = std::shared_ptr<TracialAlgebra>(new TracialAlgebra());
  alg->backend_ = TracialAlgebra::Backend::kBlock;
  alg->blocks_ = blocks;
  for (const auto& b : blocks) {
    if (b.dim < 1) throw ValidationError("block algebra: dimension must be >= 1");
    if (!(b.weight > 0.0)) throw ValidationError("block algebra: weight must be > 0");
    alg->total_dim_ += b.dim;
    alg->trace_of_identity_ += b.weight * b.dim;
  }
  return alg;
}

AlgebraPtr make_grid_algebra(std::vector<double> points, std::vector<double> weights) {
  if (points.empty()) throw ValidationError("grid algebra: needs at least one point");
  if (points.size() != weights.size())
    throw ValidationError("grid algebra: points and weights must have equal length");
  for (double w : weights)
    if (!(w > 0.0)) throw ValidationError("grid algebra: weights must be > 0");
  auto sorted = points;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ValidationError("grid algebra: sample points must be distinct");
  auto alg = std::shared_ptr<TracialAlgebra>(new TracialAlgebra());
  alg->backend_ = TracialAlgebra::Backend::kGrid;
  alg->points_ = std::move(points);
  alg->weights_ = std::move(weights);
  alg->total_dim_ = static_cast<int>(alg->points_.size());
  for (double w : alg->weights_) alg->trace_of_identity_ += w;
  return alg;
}

Element Element::trusted(AlgebraPtr algebra, std::vector<Matrix> blocks,
                         std::vector<Complex> grid_values, std::vector<Pole> poles,
                         bool hermitian) {
  Element e;
  e.algebra_ = std::move(algebra);
  e.blocks_ = std::move(blocks);
  e.grid_values_ = std::move(grid_values);
  e.poles_ = std::move(poles);
  e.hermitian_ = hermitian;
  return e;
}

Element Element::from_blocks(AlgebraPtr algebra, std::vector<Matrix> blocks, bool hermitian) {
  if (!algebra || algebra->backend() != TracialAlgebra::Backend::kBlock)
    throw ValidationError("element: block data requires a block-matrix algebra");
  if (blocks.size() != algebra->blocks().size())
    throw ValidationError("element: block count does not match the algebra");
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    int n = algebra->blocks()[k].dim;
    if (blocks[k].rows() != n || blocks[k].cols() != n)
      throw ValidationError("element: block " + std::to_string(k) + " has wrong shape");
  }
  if (hermitian) {
    for (auto& b : blocks) {
      double dev = (b - b.adjoint()).norm();
      double scale = std::max(b.norm(), 1e-300);
      if (dev > 64 * tol::kHermitian * scale)
        throw ValidationError("element: Hermitian flag set but ||A - A*|| = " + fmt(dev) +
                              " exceeds tolerance");
      b = 0.5 * (b + b.adjoint().eval());
    }
  }
  return trusted(std::move(algebra), std::move(blocks), {}, {}, hermitian);
}

Element Element::from_grid(AlgebraPtr algebra, std::vector<Complex> values, bool hermitian) {
  return from_grid_extended(std::move(algebra), std::move(values), {}, hermitian);
}

Element Element::from_grid_extended(AlgebraPtr algebra, std::vector<Complex> values,
                                    std::vector<Pole> poles, bool hermitian) {
  if (!algebra || algebra->backend() != TracialAlgebra::Backend::kGrid)
    throw ValidationError("element: grid data requires a grid algebra");
  if (values.size() != algebra->points().size())
    throw ValidationError("element: value count does not match the grid");
  if (!poles.empty() && poles.size() != values.size())
    throw ValidationError("element: pole marker count does not match the grid");
  if (hermitian) {
    for (auto& v : values) {
      if (std::abs(v.imag()) > tol::kHermitian * std::max(1.0, std::abs(v)))
        throw ValidationError("element: Hermitian grid values must be real");
      v = Complex(v.real(), 0.0);
    }
  }
  if (std::all_of(poles.begin(), poles.end(), [](Pole p) { return p == Pole::kNone; }))
    poles.clear();
  return trusted(std::move(algebra), {}, std::move(values), std::move(poles), hermitian);
}

Element Element::zero(const AlgebraPtr& algebra) { return scalar(algebra, Complex(0.0, 0.0)); }
Element Element::identity(const AlgebraPtr& algebra) { return scalar(algebra, Complex(1.0, 0.0)); }

Element Element::scalar(const AlgebraPtr& algebra, Complex c) {
  if (!algebra) throw ValidationError("element: null algebra");
  bool herm = c.imag() == 0.0;
  if (algebra->backend() == TracialAlgebra::Backend::kBlock) {
    std::vector<Matrix> blocks;
    blocks.reserve(algebra->blocks().size());
    for (const auto& b : algebra->blocks()) blocks.push_back(c * Matrix::Identity(b.dim, b.dim));
    return trusted(algebra, std::move(blocks), {}, {}, herm);
  }
  return trusted(algebra, {}, std::vector<Complex>(algebra->points().size(), c), {}, herm);
}

bool Element::has_pole() const {
  return std::any_of(poles_.begin(), poles_.end(), [](Pole p) { return p != Pole::kNone; });
}

void Element::require_finite(const char* op) const {
  if (has_pole())
    throw NumericalError(std::string(op) + ": undefined for elements carrying pole markers");
}

Element Element::operator+(const Element& rhs) const {
  check_algebras(*this, rhs, "add");
  if (algebra_->backend() == TracialAlgebra::Backend::kBlock) {
    std::vector<Matrix> out(blocks_.size());
    for (std::size_t k = 0; k < blocks_.size(); ++k) out[k] = blocks_[k] + rhs.blocks_[k];
    return trusted(algebra_, std::move(out), {}, {}, hermitian_ && rhs.hermitian_);
  }
  std::vector<Complex> out(grid_values_.size());
  std::vector<Pole> poles(grid_values_.size(), Pole::kNone);
  for (std::size_t i = 0; i < out.size(); ++i) {
    poles[i] = combine_add(pole_at(i), rhs.pole_at(i));
    out[i] = poles[i] == Pole::kNone ? grid_values_[i] + rhs.grid_values_[i] : Complex(0.0);
  }
  return from_grid_extended(algebra_, std::move(out), std::move(poles),
                            hermitian_ && rhs.hermitian_);
}

Element Element::operator-(const Element& rhs) const { return *this + (-rhs); }

Element Element::operator-() const { return Complex(-1.0, 0.0) * *this; }

Element operator*(Complex c, const Element& e) {
  bool herm = e.hermitian_ && c.imag() == 0.0;
  if (e.algebra_->backend() == TracialAlgebra::Backend::kBlock) {
    std::vector<Matrix> out(e.blocks_.size());
    for (std::size_t k = 0; k < e.blocks_.size(); ++k) out[k] = c * e.blocks_[k];
    return Element::trusted(e.algebra_, std::move(out), {}, {}, herm);
  }
  std::vector<Complex> out(e.grid_values_.size());
  std::vector<Pole> poles(e.grid_values_.size(), Pole::kNone);
  for (std::size_t i = 0; i < out.size(); ++i) {
    Pole p = e.pole_at(i);
    if (p == Pole::kNone) {
      out[i] = c * e.grid_values_[i];
    } else {
      if (p == Pole::kUnsigned || c.imag() != 0.0 || c.real() == 0.0)
        throw NumericalError("scaling a pole marker by this factor is undefined");
      poles[i] = (c.real() > 0.0) == (p == Pole::kPlus) ? Pole::kPlus : Pole::kMinus;
    }
  }
  return Element::from_grid_extended(e.algebra_, std::move(out), std::move(poles), herm);
}

Element Element::operator*(const Element& rhs) const {
  check_algebras(*this, rhs, "multiply");
  if (algebra_->backend() == TracialAlgebra::Backend::kBlock) {
    std::vector<Matrix> out(blocks_.size());
    for (std::size_t k = 0; k < blocks_.size(); ++k) out[k] = blocks_[k] * rhs.blocks_[k];
    return trusted(algebra_, std::move(out), {}, {}, false);
  }
  require_finite("multiply");
  rhs.require_finite("multiply");
  std::vector<Complex> out(grid_values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = grid_values_[i] * rhs.grid_values_[i];
  return trusted(algebra_, {}, std::move(out), {}, false);
}

Element Element::adjoint() const {
  if (algebra_->backend() == TracialAlgebra::Backend::kBlock) {
    std::vector<Matrix> out(blocks_.size());
    for (std::size_t k = 0; k < blocks_.size(); ++k) out[k] = blocks_[k].adjoint();
    return trusted(algebra_, std::move(out), {}, {}, hermitian_);
  }
  std::vector<Complex> out(grid_values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::conj(grid_values_[i]);
  return trusted(algebra_, {}, std::move(out), poles_, hermitian_);
}

Element Element::inverse() const {
  if (algebra_->backend() == TracialAlgebra::Backend::kBlock) {
    std::vector<Matrix> out(blocks_.size());
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      Eigen::PartialPivLU<Matrix> lu(blocks_[k]);
      out[k] = lu.inverse();
      if (!out[k].allFinite())
        throw NumericalError("inverse: block " + std::to_string(k) + " is singular");
    }
    return trusted(algebra_, std::move(out), {}, {}, false);
  }
  std::vector<Complex> out(grid_values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (pole_at(i) != Pole::kNone) {
      out[i] = Complex(0.0, 0.0);  // 1/inf
      continue;
    }
    if (grid_values_[i] == Complex(0.0, 0.0))
      throw NumericalError("inverse: grid value vanishes at point " + std::to_string(i));
    out[i] = 1.0 / grid_values_[i];
  }
  return trusted(algebra_, {}, std::move(out), {}, false);
}

Complex trace(const Element& a) {
  a.require_finite("trace");
  Complex sum(0.0, 0.0);
  if (a.algebra()->backend() == TracialAlgebra::Backend::kBlock) {
    const auto& specs = a.algebra()->blocks();
    for (std::size_t k = 0; k < specs.size(); ++k) sum += specs[k].weight * a.blocks()[k].trace();
    return sum;
  }
  const auto& w = a.algebra()->weights();
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * a.grid_values()[i];
  return sum;
}

namespace {

// Per-block singular values; grid values count as 1x1 blocks.
void for_each_singular_value(const Element& a, const std::function<void(double, double)>& fn) {
  a.require_finite("singular values");
  if (a.algebra()->backend() == TracialAlgebra::Backend::kBlock) {
    const auto& specs = a.algebra()->blocks();
    for (std::size_t k = 0; k < specs.size(); ++k) {
      Eigen::JacobiSVD<Matrix> svd(a.blocks()[k]);
      for (int i = 0; i < svd.singularValues().size(); ++i)
        fn(svd.singularValues()[i], specs[k].weight);
    }
    return;
  }
  const auto& w = a.algebra()->weights();
  for (std::size_t i = 0; i < w.size(); ++i) fn(std::abs(a.grid_values()[i]), w[i]);
}

}  // namespace

double trace_norm(const Element& a) {
  double sum = 0.0;
  for_each_singular_value(a, [&sum](double s, double w) { sum += w * s; });
  return sum;
}

double operator_norm(const Element& a) {
  double m = 0.0;
  for_each_singular_value(a, [&m](double s, double) { m = std::max(m, s); });
  return m;
}

double l1_norm(const Element& a) { return operator_norm(a) + trace_norm(a); }

double lp_norm(const Element& a, double p) {
  if (!(p >= 1.0)) throw ValidationError("lp_norm: p must be >= 1");
  double sum = 0.0, m = 0.0;
  for_each_singular_value(a, [&](double s, double w) {
    sum += w * std::pow(s, p);
    m = std::max(m, s);
  });
  return std::pow(sum, 1.0 / p) + m;
}

double smallest_singular_value(const Element& a) {
  double m = std::numeric_limits<double>::infinity();
  if (a.algebra()->backend() == TracialAlgebra::Backend::kGrid) {
    // Poles do not reduce invertibility margins (the inverse tends to zero).
    for (std::size_t i = 0; i < a.grid_values().size(); ++i)
      if (a.pole_at(i) == Pole::kNone) m = std::min(m, std::abs(a.grid_values()[i]));
    return m;
  }
  for_each_singular_value(a, [&m](double s, double) { m = std::min(m, s); });
  return m;
}

double distance(const Element& a, const Element& b) { return operator_norm(a - b); }

HermitianEigen hermitian_eigendecomposition(const Element& a) {
  if (!a.hermitian()) throw ValidationError("eigendecomposition requires a Hermitian element");
  HermitianEigen out;
  if (a.algebra()->backend() == TracialAlgebra::Backend::kBlock) {
    for (const auto& b : a.blocks()) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(b);
      if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
      out.eigenvalues.push_back(es.eigenvalues());
      out.eigenvectors.push_back(es.eigenvectors());
    }
    return out;
  }
  a.require_finite("eigendecomposition");
  RealVector v(a.grid_values().size());
  for (std::size_t i = 0; i < a.grid_values().size(); ++i) v[i] = a.grid_values()[i].real();
  out.eigenvalues.push_back(v);
  return out;
}

namespace {

Complex pole_value(const FunctionSpec& f, Pole p) {
  auto pos = f.limit_at(+1);
  auto neg = f.limit_at(-1);
  switch (p) {
    case Pole::kPlus:
      if (!pos) throw ValidationError("func_calc: '" + f.name() + "' has no limit at +inf");
      return *pos;
    case Pole::kMinus:
      if (!neg) throw ValidationError("func_calc: '" + f.name() + "' has no limit at -inf");
      return *neg;
    case Pole::kUnsigned:
      if (!pos || !neg || *pos != *neg)
        throw ValidationError("func_calc: '" + f.name() +
                              "' has mismatched limits at an unsigned pole");
      return *pos;
    default:
      return Complex(0.0, 0.0);
  }
}

}  // namespace

Element func_calc(const FunctionSpec& f, const Element& a) {
  if (!a.hermitian()) throw ValidationError("func_calc requires a Hermitian element");
  bool herm_out = f.real_valued();
  if (a.algebra()->backend() == TracialAlgebra::Backend::kGrid) {
    std::vector<Complex> out(a.grid_values().size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      Pole p = a.pole_at(i);
      out[i] = p == Pole::kNone ? f.value(a.grid_values()[i].real()) : pole_value(f, p);
    }
    return Element::trusted(a.algebra(), {}, std::move(out), {}, herm_out);
  }
  auto eig = hermitian_eigendecomposition(a);
  std::vector<Matrix> out(a.blocks().size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto& vals = eig.eigenvalues[k];
    Eigen::VectorXcd fv(vals.size());
    for (int i = 0; i < vals.size(); ++i) fv[i] = f.value(vals[i]);
    out[k] = eig.eigenvectors[k] * fv.asDiagonal() * eig.eigenvectors[k].adjoint();
    if (herm_out) out[k] = 0.5 * (out[k] + out[k].adjoint().eval());
  }
  return Element::trusted(a.algebra(), std::move(out), {}, {}, herm_out);
}

Element bounded_transform(const Element& d) { return func_calc(FunctionSpec::bounded_transform(), d); }

namespace {

Complex divided_difference(const FunctionSpec& g, double x, double y) {
  if (std::abs(x - y) < tol::kEigenvalueGap) return g.derivative(0.5 * (x + y));
  return (g.value(x) - g.value(y)) / (x - y);
}

// The grid rule for d/dt g(f_t) at a pole marker: admissible functions have
// derivative limit 0 at the relevant infinity, which dominates any wrap speed.
Complex grid_derivative_sample(const FunctionSpec& g, Complex value, Pole pole, Complex deriv,
                               Pole deriv_pole) {
  if (pole == Pole::kNone) {
    Complex gprime = g.derivative(value.real());
    if (deriv_pole != Pole::kNone) {
      if (gprime == Complex(0.0, 0.0)) return Complex(0.0, 0.0);
      throw NumericalError("derivative_of_function: infinite path derivative meets nonzero g'");
    }
    return gprime * deriv;
  }
  auto check_zero = [&g](int sign) {
    auto lim = g.derivative_limit_at(sign);
    if (!lim || *lim != Complex(0.0, 0.0))
      throw NumericalError("derivative_of_function: g' does not vanish at the pole limit");
  };
  if (pole == Pole::kPlus || pole == Pole::kUnsigned) check_zero(+1);
  if (pole == Pole::kMinus || pole == Pole::kUnsigned) check_zero(-1);
  return Complex(0.0, 0.0);
}

}  // namespace

Element derivative_of_function(const FunctionSpec& g, const Element& f, const Element& fdot) {
  check_algebras(f, fdot, "derivative_of_function");
  if (!g.has_derivative())
    throw ValidationError("derivative_of_function: '" + g.name() + "' has no derivative");
  bool herm_out = g.real_valued() && fdot.hermitian();
  if (f.algebra()->backend() == TracialAlgebra::Backend::kGrid) {
    if (!f.hermitian()) throw ValidationError("derivative_of_function requires Hermitian f");
    std::vector<Complex> out(f.grid_values().size());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = grid_derivative_sample(g, f.grid_values()[i], f.pole_at(i), fdot.grid_values()[i],
                                      fdot.pole_at(i));
    return Element::trusted(f.algebra(), {}, std::move(out), {}, herm_out);
  }
  auto eig = hermitian_eigendecomposition(f);
  std::vector<Matrix> out(f.blocks().size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto& vals = eig.eigenvalues[k];
    const Matrix& v = eig.eigenvectors[k];
    Matrix w = v.adjoint() * fdot.blocks()[k] * v;
    Matrix r(w.rows(), w.cols());
    for (int i = 0; i < w.rows(); ++i)
      for (int j = 0; j < w.cols(); ++j) r(i, j) = divided_difference(g, vals[i], vals[j]) * w(i, j);
    out[k] = v * r * v.adjoint();
  }
  return Element::trusted(f.algebra(), std::move(out), {}, {}, herm_out);
}

FourierData fourier_data_of(const FunctionSpec& g, double support_radius,
                            const QuadratureConfig& quad) {
  if (!(support_radius > 0.0))
    throw ValidationError("fourier_data_of: support radius must be > 0");
  QuadratureConfig cfg = quad;
  cfg.tolerance = std::min(quad.tolerance * 1e-3, 1e-12);
  auto cache = std::make_shared<std::map<double, double>>();
  double r = support_radius;
  FourierData data;
  data.support_radius = r;
  data.ghat = [g, r, cfg, cache](double lambda) {
    if (auto it = cache->find(lambda); it != cache->end()) return it->second;
    // g real and even in all uses here, but integrate the full transform anyway.
    auto re = [&g, lambda](double x, Side) {
      return (g.value(x) * std::exp(Complex(0.0, -lambda * x))).real();
    };
    int chunks = std::max(4, static_cast<int>(std::abs(lambda) * r / kPi) + 1);
    std::vector<double> cuts;
    for (int i = 1; i < chunks; ++i) cuts.push_back(-r + 2.0 * r * i / chunks);
    auto q = integrate_real(re, -r, r, cfg, cuts, 2);
    double v = q.value / (2.0 * kPi);
    (*cache)[lambda] = v;
    return v;
  };
  return data;
}

Element duhamel_derivative(const FunctionSpec& g, const FourierData& fourier, const Element& f,
                           const Element& fdot, const QuadratureConfig& quad) {
  check_algebras(f, fdot, "duhamel_derivative");
  if (f.algebra()->backend() != TracialAlgebra::Backend::kBlock)
    throw ValidationError("duhamel_derivative: block-matrix backend only");
  if (operator_norm(f) > 1.0 + tol::kHermitian)
    throw ValidationError("duhamel_derivative requires ||F|| <= 1");
  quad.validate();

  // Truncation radius: scan |l ghat(l)| outward until it stays below the
  // configured threshold (the integrand decays superpolynomially for smooth g).
  double threshold = quad.tolerance * quad.truncation_ratio /
                     std::max(1.0, operator_norm(fdot));
  double lambda_max = 0.0;
  {
    int consecutive = 0;
    for (double l = 20.0; l <= 4000.0; l += 20.0) {
      if (std::abs(l * fourier.ghat(l)) < threshold &&
          std::abs(l * fourier.ghat(l - 10.0)) < threshold)
        ++consecutive;
      else
        consecutive = 0;
      if (consecutive >= 3) {
        lambda_max = l;
        break;
      }
    }
    if (lambda_max == 0.0)
      throw NumericalError("duhamel_derivative: Fourier data does not decay below " +
                           fmt(threshold) + " within the scan window");
  }

  auto eig = hermitian_eigendecomposition(f);
  std::vector<Matrix> out(f.blocks().size());
  auto matrix_norm = [](const Matrix& m) { return m.cwiseAbs().maxCoeff(); };

  for (std::size_t k = 0; k < f.blocks().size(); ++k) {
    const auto& vals = eig.eigenvalues[k];
    const Matrix& v = eig.eigenvectors[k];
    const Matrix w = v.adjoint() * fdot.blocks()[k] * v;
    const int n = static_cast<int>(vals.size());

    auto inner_over_u = [&](double lambda) -> Matrix {
      auto entry_phase = [&](double u, Side) -> Matrix {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            m(i, j) = std::exp(Complex(0.0, lambda * ((1.0 - u) * vals[i] + u * vals[j]))) * w(i, j);
        return m;
      };
      int chunks = std::max(1, static_cast<int>(std::abs(lambda) / kPi) + 1);
      std::vector<double> cuts;
      for (int i = 1; i < chunks; ++i) cuts.push_back(static_cast<double>(i) / chunks);
      QuadratureConfig inner = quad;
      inner.tolerance = quad.tolerance * 0.02;
      auto res = detail::integrate_segmented<Matrix>(entry_phase, matrix_norm, 0.0, 1.0, inner,
                                                     cuts, 1);
      if (!res.converged)
        throw NumericalError("duhamel_derivative: inner quadrature stalled at estimate " +
                             fmt(res.error_estimate));
      return res.value;
    };

    auto outer = [&](double lambda, Side) -> Matrix {
      return Complex(0.0, lambda * fourier.ghat(lambda)) * inner_over_u(lambda);
    };
    int chunks = std::max(8, static_cast<int>(lambda_max));
    std::vector<double> cuts;
    for (int i = 1; i < chunks; ++i)
      cuts.push_back(-lambda_max + 2.0 * lambda_max * i / chunks);
    auto res = detail::integrate_segmented<Matrix>(outer, matrix_norm, -lambda_max, lambda_max,
                                                   quad, cuts, 1);
    if (!res.converged)
      throw NumericalError("duhamel_derivative: outer quadrature stalled at estimate " +
                           fmt(res.error_estimate));
    out[k] = v * res.value * v.adjoint();
  }
  return Element::trusted(f.algebra(), std::move(out), {}, {},
                          g.real_valued() && fdot.hermitian());
}

}  // namespace specflow
