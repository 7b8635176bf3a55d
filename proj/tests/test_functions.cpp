#include <doctest.h>

#include <cmath>

#include "specflow/functions.hpp"
#include "specflow/quadrature.hpp"

using namespace specflow;

namespace {

void check_normalizing_shape(const NormalizingFunction& chi, double span) {
  // odd, non-decreasing, zero only at zero: dense sampling
  double prev = -2.0;
  for (int i = 0; i <= 4000; ++i) {
    double x = -span + 2.0 * span * i / 4000.0;
    double v = chi.value(x);
    CHECK(std::abs(v + chi.value(-x)) < 1e-12);
    CHECK(v >= prev - 1e-12);
    if (x > 1e-6) CHECK(v > 0.0);
    if (x < -1e-6) CHECK(v < 0.0);
    prev = v;
  }
}

}  // namespace

TEST_CASE("smooth_gap is an exact involution outside its gap") {
  auto chi = NormalizingFunction::smooth_gap(0.25);
  check_normalizing_shape(chi, 2.0);
  CHECK(chi.value(0.25) == 1.0);
  CHECK(chi.value(-0.3) == -1.0);
  CHECK(chi.value(7.0) == 1.0);
  CHECK(chi.derivative(0.3) == 0.0);
  CHECK(chi.derivative(0.1) > 0.0);
  CHECK(chi.value(0.0) == 0.0);
}

TEST_CASE("chi_e normalization constant equals sqrt(pi)/2 to 1e-10") {
  auto chi = NormalizingFunction::chi_e();
  CHECK(std::abs(chi.normalization_constant() - 0.5 * kSqrtPi) < 1e-10);
  check_normalizing_shape(chi, 1.0);
  CHECK(std::abs(chi.value(1.0) - 1.0) < 1e-12);
  CHECK(std::abs(chi.value(-1.0) + 1.0) < 1e-12);
}

TEST_CASE("chi_p special values") {
  // chi_2 is the identity on [-1,1]
  auto chi2 = NormalizingFunction::chi_p(2.0);
  CHECK(std::abs(chi2.normalization_constant() - 1.0) < 1e-12);
  for (double x : {-0.9, -0.4, 0.0, 0.3, 0.99})
    CHECK(std::abs(chi2.value(x) - x) < 1e-12);
  // chi_1 is (2/pi) arcsin
  auto chi1 = NormalizingFunction::chi_p(1.0);
  CHECK(std::abs(chi1.normalization_constant() - 0.5 * kPi) < 1e-11);
  for (double x : {-0.8, 0.2, 0.7})
    CHECK(std::abs(chi1.value(x) - 2.0 / kPi * std::asin(x)) < 1e-11);
  check_normalizing_shape(chi1, 1.0);
  check_normalizing_shape(NormalizingFunction::chi_p(3.0), 1.0);
}

TEST_CASE("composition with the bounded transform") {
  // chi_e composed is erf: check against the table-based route
  auto chi_e = NormalizingFunction::chi_e();
  auto composed = FunctionSpec::compose_with_bounded_transform(chi_e);
  for (double d : {-2.0, -0.5, 0.3, 1.7}) {
    double f = d / std::sqrt(1.0 + d * d);
    CHECK(std::abs(composed.value(d).real() - chi_e.value(f)) < 1e-10);
    CHECK(std::abs(composed.value(d).real() - std::erf(d)) < 1e-12);
  }
  // chi_p composed: derivative is (1/C_p)(1+x^2)^{-(p+1)/2}
  auto chi3 = NormalizingFunction::chi_p(3.0);
  auto comp3 = FunctionSpec::compose_with_bounded_transform(chi3);
  for (double d : {-1.2, 0.4, 2.5}) {
    double expect = std::pow(1.0 + d * d, -2.0) / chi3.normalization_constant();
    CHECK(std::abs(comp3.derivative(d).real() - expect) < 1e-12);
    double f = d / std::sqrt(1.0 + d * d);
    CHECK(std::abs(comp3.value(d).real() - chi3.value(f)) < 1e-12);
  }
}

TEST_CASE("winding phase has unit limits and derivative vanishing at infinity") {
  auto chi = NormalizingFunction::smooth_gap(0.5);
  auto phase = FunctionSpec::winding_phase(chi);
  CHECK(std::abs(*phase.limit_at(+1) - Complex(1.0, 0.0)) == 0.0);
  CHECK(std::abs(*phase.limit_at(-1) - Complex(1.0, 0.0)) == 0.0);
  CHECK(*phase.derivative_limit_at(+1) == Complex(0.0, 0.0));
  // |e^{i pi (chi+1)}| = 1 everywhere
  for (double x : {-0.7, -0.2, 0.1, 0.4, 3.0})
    CHECK(std::abs(std::abs(phase.value(x)) - 1.0) < 1e-14);
  // involution points map to exactly 1 up to rounding
  CHECK(std::abs(phase.value(0.5) - Complex(1.0, 0.0)) < 1e-14);
}

TEST_CASE("function spec limits and errors") {
  auto step = FunctionSpec::nonnegative_indicator();
  CHECK(step.value(0.0).real() == 1.0);
  CHECK(step.value(-1e-30).real() == 0.0);
  CHECK(!step.has_derivative());
  CHECK_THROWS_AS(step.derivative(1.0), ValidationError);
  auto f = FunctionSpec::from_real("square", [](double x) { return x * x; });
  CHECK(!f.limit_at(+1).has_value());
}
