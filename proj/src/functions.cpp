#include "specflow/functions.hpp"

#include <cmath>
#include <vector>

#include "specflow/quadrature.hpp"

namespace specflow {

namespace {

constexpr int kTableIntervals = 1 << 14;

double bump(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - s * s));
}

double chi_e_integrand(double y) {
  if (std::abs(y) >= 1.0) return 0.0;
  double w = 1.0 - y * y;
  return std::pow(w, -1.5) * std::exp(1.0 - 1.0 / w);
}

// Prefix integrals of a smooth nonnegative integrand over [0, length], built
// once from a composite Simpson pass; arbitrary arguments are served from the
// nearest node plus a 5-point Gauss correction on the remainder.
class CumulativeTable {
 public:
  CumulativeTable(std::function<double(double)> f, double length)
      : f_(std::move(f)), length_(length), h_(length / kTableIntervals) {
    std::vector<double> fv(kTableIntervals + 1);
    for (int i = 0; i <= kTableIntervals; ++i) fv[i] = f_(i * h_);
    prefix_.assign(kTableIntervals + 1, 0.0);
    for (int i = 0; i + 2 <= kTableIntervals; i += 2) {
      double pair = (h_ / 3.0) * (fv[i] + 4.0 * fv[i + 1] + fv[i + 2]);
      // quadratic-interpolant half integral for the odd node
      double half = (h_ / 12.0) * (5.0 * fv[i] + 8.0 * fv[i + 1] - fv[i + 2]);
      prefix_[i + 1] = prefix_[i] + half;
      prefix_[i + 2] = prefix_[i] + pair;
    }
  }

  double integral_to(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= length_) return prefix_.back();
    int i = std::min(static_cast<int>(x / h_), kTableIntervals - 1);
    return prefix_[i] + gauss5(i * h_, x);
  }

  double total() const { return prefix_.back(); }

 private:
  double gauss5(double a, double b) const {
    static constexpr double kNodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                         0.5384693101056831, 0.9061798459386640};
    static constexpr double kWeights[5] = {0.2369268850561891, 0.4786286704993665,
                                           0.5688888888888889, 0.4786286704993665,
                                           0.2369268850561891};
    double c = 0.5 * (a + b), r = 0.5 * (b - a);
    double sum = 0.0;
    for (int j = 0; j < 5; ++j) sum += kWeights[j] * f_(c + r * kNodes[j]);
    return r * sum;
  }

  std::function<double(double)> f_;
  double length_;
  double h_;
  std::vector<double> prefix_;
};

}  // namespace

struct NormalizingFunction::Impl {
  Kind kind;
  double eps = 0.0;
  double p = 0.0;
  std::shared_ptr<const CumulativeTable> table;
  double normalizer = 1.0;  // total integral of the profile

  double value(double x) const {
    double s = x < 0.0 ? -1.0 : (x > 0.0 ? 1.0 : 0.0);
    double ax = std::abs(x);
    switch (kind) {
      case Kind::kSmoothGap:
        if (ax >= eps) return s;
        return s * table->integral_to(ax / eps) / normalizer;
      case Kind::kChiE:
        if (ax >= 1.0) return s;
        return s * table->integral_to(ax) / normalizer;
      case Kind::kChiP:
        if (ax >= 1.0) return s;
        return s * table->integral_to(std::asin(ax)) / normalizer;
    }
    return s;
  }

  double derivative(double x) const {
    double ax = std::abs(x);
    switch (kind) {
      case Kind::kSmoothGap:
        if (ax >= eps) return 0.0;
        return bump(x / eps) / (normalizer * eps);
      case Kind::kChiE:
        return chi_e_integrand(ax) / normalizer;
      case Kind::kChiP:
        if (ax >= 1.0) return 0.0;
        return std::pow(1.0 - x * x, 0.5 * p - 1.0) / normalizer;
    }
    return 0.0;
  }
};

NormalizingFunction::NormalizingFunction(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

NormalizingFunction NormalizingFunction::smooth_gap(double eps) {
  if (!(eps > 0.0)) throw ValidationError("smooth_gap: eps must be > 0");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::kSmoothGap;
  impl->eps = eps;
  impl->table = std::make_shared<CumulativeTable>(bump, 1.0);
  impl->normalizer = impl->table->total();
  return NormalizingFunction(impl);
}

NormalizingFunction NormalizingFunction::chi_e() {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::kChiE;
  impl->table = std::make_shared<CumulativeTable>(chi_e_integrand, 1.0);
  impl->normalizer = impl->table->total();  // analytically sqrt(pi)/2
  return NormalizingFunction(impl);
}

NormalizingFunction NormalizingFunction::chi_p(double p) {
  if (!(p >= 1.0)) throw ValidationError("chi_p: p must be >= 1");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::kChiP;
  impl->p = p;
  // y = sin(theta) removes the endpoint singularity for p < 2.
  impl->table = std::make_shared<CumulativeTable>(
      [p](double theta) { return std::pow(std::cos(theta), p - 1.0); }, 0.5 * kPi);
  impl->normalizer = impl->table->total();
  return NormalizingFunction(impl);
}

NormalizingFunction::Kind NormalizingFunction::kind() const { return impl_->kind; }
double NormalizingFunction::gap() const { return impl_->eps; }
double NormalizingFunction::power() const { return impl_->p; }
double NormalizingFunction::value(double x) const { return impl_->value(x); }
double NormalizingFunction::derivative(double x) const { return impl_->derivative(x); }
double NormalizingFunction::normalization_constant() const { return impl_->normalizer; }

FunctionSpec FunctionSpec::identity() {
  FunctionSpec f;
  f.name_ = "identity";
  f.value_ = [](double x) { return Complex(x, 0.0); };
  f.derivative_ = [](double) { return Complex(1.0, 0.0); };
  return f;
}

FunctionSpec FunctionSpec::bounded_transform() {
  FunctionSpec f;
  f.name_ = "bounded_transform";
  f.value_ = [](double x) { return Complex(x / std::sqrt(1.0 + x * x), 0.0); };
  f.derivative_ = [](double x) { return Complex(std::pow(1.0 + x * x, -1.5), 0.0); };
  f.limit_neg_ = Complex(-1.0, 0.0);
  f.limit_pos_ = Complex(1.0, 0.0);
  f.dlimit_neg_ = Complex(0.0, 0.0);
  f.dlimit_pos_ = Complex(0.0, 0.0);
  return f;
}

FunctionSpec FunctionSpec::nonnegative_indicator() {
  FunctionSpec f;
  f.name_ = "nonnegative_indicator";
  f.value_ = [](double x) { return Complex(x >= 0.0 ? 1.0 : 0.0, 0.0); };
  f.limit_neg_ = Complex(0.0, 0.0);
  f.limit_pos_ = Complex(1.0, 0.0);
  return f;
}

FunctionSpec FunctionSpec::from_normalizing(const NormalizingFunction& chi) {
  FunctionSpec f;
  f.name_ = "normalizing";
  f.value_ = [chi](double x) { return Complex(chi.value(x), 0.0); };
  f.derivative_ = [chi](double x) { return Complex(chi.derivative(x), 0.0); };
  f.limit_neg_ = Complex(-1.0, 0.0);
  f.limit_pos_ = Complex(1.0, 0.0);
  f.dlimit_neg_ = Complex(0.0, 0.0);
  f.dlimit_pos_ = Complex(0.0, 0.0);
  return f;
}

FunctionSpec FunctionSpec::winding_phase(const NormalizingFunction& chi) {
  FunctionSpec f;
  f.name_ = "winding_phase";
  f.value_ = [chi](double x) {
    return std::exp(Complex(0.0, kPi * (chi.value(x) + 1.0)));
  };
  f.derivative_ = [chi](double x) {
    Complex u = std::exp(Complex(0.0, kPi * (chi.value(x) + 1.0)));
    return Complex(0.0, kPi * chi.derivative(x)) * u;
  };
  // chi(+-inf) = +-1, so the phase tends to 1 from both ends.
  f.limit_neg_ = Complex(1.0, 0.0);
  f.limit_pos_ = Complex(1.0, 0.0);
  f.dlimit_neg_ = Complex(0.0, 0.0);
  f.dlimit_pos_ = Complex(0.0, 0.0);
  f.real_valued_ = false;
  return f;
}

FunctionSpec FunctionSpec::compose_with_bounded_transform(const NormalizingFunction& chi) {
  FunctionSpec f;
  switch (chi.kind()) {
    case NormalizingFunction::Kind::kChiE:
      // chi_e(x (1+x^2)^{-1/2}) = erf(x): substitute y = s (1+s^2)^{-1/2} in the
      // defining integral and the integrand collapses to (2/sqrt(pi)) e^{-s^2}.
      f.name_ = "chi_e_of_bounded_transform";
      f.value_ = [](double x) { return Complex(std::erf(x), 0.0); };
      f.derivative_ = [](double x) { return Complex(2.0 / kSqrtPi * std::exp(-x * x), 0.0); };
      break;
    case NormalizingFunction::Kind::kChiP: {
      double p = chi.power();
      double cp = chi.normalization_constant();
      f.name_ = "chi_p_of_bounded_transform";
      f.value_ = [chi](double x) {
        double fx = x / std::sqrt(1.0 + x * x);
        return Complex(chi.value(fx), 0.0);
      };
      f.derivative_ = [p, cp](double x) {
        return Complex(std::pow(1.0 + x * x, -0.5 * (p + 1.0)) / cp, 0.0);
      };
      break;
    }
    case NormalizingFunction::Kind::kSmoothGap:
      f.name_ = "gap_of_bounded_transform";
      f.value_ = [chi](double x) {
        double fx = x / std::sqrt(1.0 + x * x);
        return Complex(chi.value(fx), 0.0);
      };
      f.derivative_ = [chi](double x) {
        double fx = x / std::sqrt(1.0 + x * x);
        return Complex(chi.derivative(fx) * std::pow(1.0 + x * x, -1.5), 0.0);
      };
      break;
  }
  f.limit_neg_ = Complex(-1.0, 0.0);
  f.limit_pos_ = Complex(1.0, 0.0);
  f.dlimit_neg_ = Complex(0.0, 0.0);
  f.dlimit_pos_ = Complex(0.0, 0.0);
  return f;
}

FunctionSpec FunctionSpec::from_real(std::string name, std::function<double(double)> f,
                                     std::function<double(double)> df,
                                     std::optional<double> limit_neg,
                                     std::optional<double> limit_pos) {
  FunctionSpec spec;
  spec.name_ = std::move(name);
  spec.value_ = [f = std::move(f)](double x) { return Complex(f(x), 0.0); };
  if (df) spec.derivative_ = [df = std::move(df)](double x) { return Complex(df(x), 0.0); };
  if (limit_neg) spec.limit_neg_ = Complex(*limit_neg, 0.0);
  if (limit_pos) spec.limit_pos_ = Complex(*limit_pos, 0.0);
  return spec;
}

FunctionSpec FunctionSpec::from_complex(std::string name, ValueFn f, ValueFn df,
                                        std::optional<Complex> limit_neg,
                                        std::optional<Complex> limit_pos) {
  FunctionSpec spec;
  spec.name_ = std::move(name);
  spec.value_ = std::move(f);
  spec.derivative_ = std::move(df);
  spec.limit_neg_ = limit_neg;
  spec.limit_pos_ = limit_pos;
  spec.real_valued_ = false;
  return spec;
}

Complex FunctionSpec::value(double x) const { return value_(x); }
bool FunctionSpec::has_derivative() const { return static_cast<bool>(derivative_); }

Complex FunctionSpec::derivative(double x) const {
  if (!derivative_) throw ValidationError("function '" + name_ + "' has no derivative");
  return derivative_(x);
}

std::optional<Complex> FunctionSpec::limit_at(int sign) const {
  return sign >= 0 ? limit_pos_ : limit_neg_;
}

std::optional<Complex> FunctionSpec::derivative_limit_at(int sign) const {
  return sign >= 0 ? dlimit_pos_ : dlimit_neg_;
}

FunctionSpec FunctionSpec::with_derivative_limits(Complex neg, Complex pos) const {
  FunctionSpec copy = *this;
  copy.dlimit_neg_ = neg;
  copy.dlimit_pos_ = pos;
  return copy;
}

}  // namespace specflow
