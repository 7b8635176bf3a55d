#include <doctest.h>

#include <cmath>

#include "specflow/random_suite.hpp"
#include "specflow/spectral_flow.hpp"

using namespace specflow;

namespace {

OperatorPath scalar_linear_path(double a, double b, double weight) {
  auto alg = make_block_algebra({{1, weight}});
  Matrix ma(1, 1), mb(1, 1);
  ma << Complex(a, 0.0);
  mb << Complex(b, 0.0);
  return make_linear_path(Element::from_blocks(alg, {ma}, true),
                          Element::from_blocks(alg, {mb}, true));
}

NormalizingFunction gap_for(const OperatorPath& p, double cap = 0.4) {
  double m = std::min(p.endpoint_start().margin, p.endpoint_end().margin);
  return NormalizingFunction::smooth_gap(std::min(cap, 0.5 * m));
}

}  // namespace

TEST_CASE("scalar path 2t-1 flows by the block weight through every method") {
  QuadratureConfig cfg;
  for (double c : {1.0, 0.6}) {
    auto path = scalar_linear_path(-1.0, 1.0, c);
    CHECK(sf_crossing(path).value == doctest::Approx(c).epsilon(1e-14));
    CHECK(sf_analytic(path, uniform_partition(3)).value == doctest::Approx(c).epsilon(1e-14));
    CHECK(sf_winding(path, gap_for(path), cfg).value == doctest::Approx(c).epsilon(1e-8));
  }
}

TEST_CASE("paths of invertible operators have zero spectral flow") {
  auto alg = make_block_algebra({{2, 1.0}});
  Matrix a = Matrix::Zero(2, 2), b = Matrix::Zero(2, 2);
  a(0, 0) = Complex(1.0, 0.0);
  a(1, 1) = Complex(-2.0, 0.0);
  b(0, 0) = Complex(2.0, 0.0);
  b(1, 1) = Complex(-2.0, 0.0);
  auto path = make_linear_path(Element::from_blocks(alg, {a}, true),
                               Element::from_blocks(alg, {b}, true));
  QuadratureConfig cfg;
  CHECK(std::abs(sf_winding(path, NormalizingFunction::smooth_gap(0.5), cfg).value) < 1e-10);
  CHECK(sf_crossing(path).value == 0.0);
}

TEST_CASE("methods agree on random block paths") {
  RandomSuite rnd(101);
  QuadratureConfig cfg;
  for (int rep = 0; rep < 10; ++rep) {
    auto alg = rnd.random_block_algebra(2, 3, 12);
    auto path = rnd.random_invertible_path(alg, 0.08);
    auto chi = NormalizingFunction::smooth_gap(0.05);
    double w = sf_winding(path, chi, cfg).value;
    double c = sf_crossing(path).value;
    double a = sf_analytic(path, uniform_partition(64)).value;
    CHECK(std::abs(w - c) < 1e-6);
    CHECK(std::abs(w - a) < 1e-6);
  }
}

TEST_CASE("normalizing-function independence") {
  RandomSuite rnd(103);
  QuadratureConfig cfg;
  auto alg = rnd.random_block_algebra(2, 3, 10);
  auto path = rnd.random_invertible_path(alg, 0.1);
  double w1 = sf_winding(path, NormalizingFunction::smooth_gap(0.04), cfg).value;
  double w2 = sf_winding(path, NormalizingFunction::smooth_gap(0.09), cfg).value;
  CHECK(std::abs(w1 - w2) < 1e-7);
}

TEST_CASE("winding flow requires the gap below the endpoint margins") {
  auto path = scalar_linear_path(-0.5, 0.5, 1.0);
  QuadratureConfig cfg;
  CHECK_THROWS_AS(sf_winding(path, NormalizingFunction::smooth_gap(0.8), cfg), ValidationError);
}

TEST_CASE("non-invertible endpoints direct the caller to regularization") {
  auto path = scalar_linear_path(0.0, 1.0, 1.0);
  QuadratureConfig cfg;
  try {
    sf_winding(path, NormalizingFunction::smooth_gap(0.1), cfg);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("regularize_endpoints") != std::string::npos);
  }
}

TEST_CASE("homotopy invariance between paths with shared endpoints") {
  RandomSuite rnd(107);
  QuadratureConfig cfg;
  auto alg = rnd.random_block_algebra(2, 2, 8);
  auto p = rnd.random_invertible_path(alg, 0.1);
  Element bump = rnd.random_hermitian_element(alg, 0.8);
  // q(t) = p(t) + t(1-t) bump shares p's endpoints
  auto q_value = [p, bump](double t, Side side) {
    return p.value(t, side) + (t * (1.0 - t)) * bump;
  };
  auto q_deriv = [p, bump](double t, Side side) {
    return p.derivative(t, side) + (1.0 - 2.0 * t) * bump;
  };
  OperatorPath q(alg, q_value, q_deriv);
  auto chi = NormalizingFunction::smooth_gap(0.05);
  CHECK(std::abs(sf_winding(p, chi, cfg).value - sf_winding(q, chi, cfg).value) < 1e-6);
}

TEST_CASE("positive scaling leaves the flow unchanged") {
  RandomSuite rnd(109);
  QuadratureConfig cfg;
  auto alg = rnd.random_block_algebra(2, 2, 8);
  auto p = rnd.random_invertible_path(alg, 0.1);
  double base_crossing = sf_crossing(p).value;
  for (double c : {0.1, 10.0}) {
    auto scaled_value = [p, c](double t, Side side) { return c * p.value(t, side); };
    auto scaled_deriv = [p, c](double t, Side side) { return c * p.derivative(t, side); };
    OperatorPath scaled(alg, scaled_value, scaled_deriv);
    CHECK(sf_crossing(scaled).value == base_crossing);  // exact
    auto chi = NormalizingFunction::smooth_gap(0.4 * c * 0.1);
    CHECK(std::abs(sf_winding(scaled, chi, cfg).value - base_crossing) < 1e-8);
  }
}

TEST_CASE("concatenation, reversal, conjugation") {
  RandomSuite rnd(113);
  QuadratureConfig cfg;
  auto alg = rnd.random_block_algebra(2, 2, 8);
  auto p = rnd.random_invertible_path(alg, 0.1);

  // sf(reverse(p)) = -sf(p), exactly for the crossing oracle
  CHECK(sf_crossing(reverse(p)).value == -sf_crossing(p).value);

  // sf(concat(p, reverse(p))) = 0
  auto loop = concat(p, reverse(p));
  CHECK(sf_crossing(loop).value == 0.0);
  CHECK(std::abs(sf_winding(loop, NormalizingFunction::smooth_gap(0.05), cfg).value) < 1e-8);

  // conjugation by a t-dependent unitary family
  Element h = rnd.random_hermitian_element(alg);
  auto unitary = [alg, h](double t) {
    auto rot =
        FunctionSpec::from_complex("rotation", [t](double x) { return std::exp(Complex(0.0, t * x)); });
    return func_calc(rot, h);
  };
  auto conj = conjugate(p, unitary);
  auto chi = NormalizingFunction::smooth_gap(0.05);
  CHECK(std::abs(sf_winding(conj, chi, cfg).value - sf_winding(p, chi, cfg).value) < 1e-7);

  // concat requires matching endpoints
  auto q = rnd.random_invertible_path(alg, 0.1);
  CHECK_THROWS_AS(concat(p, q), ValidationError);
}

TEST_CASE("analytic flow telescopes on closed block paths") {
  RandomSuite rnd(127);
  auto alg = rnd.random_block_algebra(2, 2, 8);
  Element a = rnd.random_hermitian_element(alg);
  Element c = rnd.random_hermitian_element(alg);
  // closed loop a -> a with a bump, kept invertible at the endpoints
  if (smallest_singular_value(a) < 0.05) a = a + 0.3 * Element::identity(alg);
  OperatorPath loop(alg, [a, c](double t, Side) { return a + (t * (1.0 - t)) * c; },
                    [a, c](double t, Side) { return (1.0 - 2.0 * t) * c; });
  CHECK(std::abs(sf_analytic(loop, uniform_partition(64)).value) < 1e-12);
}

TEST_CASE("Lemma 4.2 analogue: projections move slower than twice the perturbation") {
  RandomSuite rnd(131);
  auto step = FunctionSpec::nonnegative_indicator();
  for (int rep = 0; rep < 20; ++rep) {
    auto alg = rnd.random_block_algebra(1, 2, 8);
    // F: a random involution; A: Hermitian with ||A|| < 1/2
    Element h = rnd.random_hermitian_element(alg);
    Element f = func_calc(FunctionSpec::from_real(
                              "sign", [](double x) { return x >= 0.0 ? 1.0 : -1.0; }),
                          h);
    Element a = rnd.random_hermitian_element(alg);
    double target = rnd.uniform(0.05, 0.49);
    a = (target / operator_norm(a)) * a;
    Element pf = func_calc(step, f);
    Element pfa = func_calc(step, f + a);
    CHECK(operator_norm(pfa - pf) < 2.0 * operator_norm(a));
  }
}

TEST_CASE("endpoint regularization") {
  // already-invertible endpoints: identity operation
  auto inv = scalar_linear_path(1.0, 2.0, 1.0);
  auto reg0 = regularize_endpoints(inv, 0.5);
  CHECK(reg0.correction_total == 0.0);
  CHECK(distance(reg0.path.value(0.3), inv.value(0.3)) == 0.0);

  // d_t = t: kernel departs upward at the start; total flow 0
  auto departing = scalar_linear_path(0.0, 1.0, 1.0);
  auto reg1 = regularize_endpoints(departing, 0.5);
  double total1 = sf_crossing(reg1.path).value - reg1.correction_total;
  CHECK(total1 == doctest::Approx(0.0).epsilon(1e-14));
  // the regularized start is 0 + 1*Q = 1
  CHECK(reg1.path.value(0.0).blocks()[0](0, 0).real() == doctest::Approx(1.0));

  // d_t = t - 1: kernel arrives at the end; +1 per the 1_{>=0} convention,
  // matching the crossing count of the upward eps-shifted path
  auto arriving = scalar_linear_path(-1.0, 0.0, 1.0);
  auto reg2 = regularize_endpoints(arriving, 0.5);
  double total2 = sf_crossing(reg2.path).value - reg2.correction_total;
  auto shifted = scalar_linear_path(-1.0 + 1e-6, 1e-6, 1.0);
  CHECK(total2 == doctest::Approx(sf_crossing(shifted).value).epsilon(1e-14));
  CHECK(total2 == doctest::Approx(1.0).epsilon(1e-14));

  // eps that fails to separate the kernel errors out
  auto close = scalar_linear_path(0.0, 1.0, 1.0);
  CHECK_THROWS_AS(regularize_endpoints(close, 1.0), ValidationError);

  // both methods agree on the regularized path
  QuadratureConfig cfg;
  double w = sf_winding(reg1.path, gap_for(reg1.path), cfg).value;
  CHECK(std::abs(w - sf_crossing(reg1.path).value) < 1e-8);
}

TEST_CASE("report recomputes discrepancies from stored values") {
  SpectralFlowReport report;
  report.add("winding", {1.0, 1e-9, {}});
  report.add("crossing", {1.0 + 3e-7, 0.0, {}});
  auto d = report.discrepancies();
  CHECK(d.at("crossing_vs_winding") == doctest::Approx(3e-7));
  CHECK(report.max_discrepancy() == doctest::Approx(3e-7));
}
