#include <doctest.h>

#include <cmath>

#include "specflow/integral_formulas.hpp"
#include "specflow/random_suite.hpp"

using namespace specflow;

namespace {

OperatorPath scalar_linear_path(double a, double b, double weight = 1.0) {
  auto alg = make_block_algebra({{1, weight}});
  Matrix ma(1, 1), mb(1, 1);
  ma << Complex(a, 0.0);
  mb << Complex(b, 0.0);
  return make_linear_path(Element::from_blocks(alg, {ma}, true),
                          Element::from_blocks(alg, {mb}, true));
}

Element scalar_element(double d, double weight = 1.0) {
  auto alg = make_block_algebra({{1, weight}});
  Matrix m(1, 1);
  m << Complex(d, 0.0);
  return Element::from_blocks(alg, {m}, true);
}

}  // namespace

TEST_CASE("cp constants match the Gamma identity") {
  CHECK(cp_constant(2.0).by_quadrature == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cp_constant(1.0).by_quadrature == doctest::Approx(0.5 * kPi).epsilon(1e-12));
  CHECK(cp_constant(3.0).by_gamma == doctest::Approx(0.25 * kPi).epsilon(1e-12));
  for (double p : {1.0, 1.5, 2.0, 3.0, 5.0}) {
    auto c = cp_constant(p);
    CHECK(std::abs(c.by_quadrature - c.by_gamma) < 1e-10);
  }
  CHECK_THROWS_AS(cp_constant(0.5), ValidationError);
}

TEST_CASE("eta1 closed form: sign(d) erfc(|d|)") {
  QuadratureConfig cfg;
  for (double d : {0.5, -0.5, 2.0, -2.0}) {
    auto r = eta1(scalar_element(d), cfg);
    double expect = (d > 0 ? 1.0 : -1.0) * std::erfc(std::abs(d));
    CHECK(std::abs(r.value - expect) < 1e-8);
  }
  // block weight scales linearly
  auto r = eta1(scalar_element(2.0, 0.7), cfg);
  CHECK(std::abs(r.value - 0.7 * std::erfc(2.0)) < 1e-8);
}

TEST_CASE("eta1 vanishes on symmetric spectra and rejects kernels") {
  QuadratureConfig cfg;
  auto alg = make_block_algebra({{2, 1.0}});
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = Complex(1.0, 0.0);
  m(1, 1) = Complex(-1.0, 0.0);
  CHECK(std::abs(eta1(Element::from_blocks(alg, {m}, true), cfg).value) < 1e-12);
  CHECK_THROWS_AS(eta1(Element::zero(alg), cfg), NumericalError);
}

TEST_CASE("endpoint defect two-route identity") {
  QuadratureConfig cfg;
  auto chi_e_line = FunctionSpec::compose_with_bounded_transform(NormalizingFunction::chi_e());

  // scalar: sign(d) - erf(d) = sign(d) erfc(|d|), matching eta1
  for (double d : {0.8, -1.3}) {
    auto r = endpoint_defect(scalar_element(d), chi_e_line, cfg);
    double expect = (d > 0 ? 1.0 : -1.0) * std::erfc(std::abs(d));
    CHECK(std::abs(r.direct - expect) < 1e-12);
    CHECK(r.discrepancy < 1e-8);
    CHECK(std::abs(r.direct - eta1(scalar_element(d), cfg).value) < 1e-8);
  }

  // exact involution chi: defect vanishes identically
  auto gap = NormalizingFunction::smooth_gap(0.3);
  auto gap_line = FunctionSpec::from_normalizing(gap);
  auto r0 = endpoint_defect(scalar_element(1.5), gap_line, cfg);
  CHECK(r0.direct == 0.0);
  CHECK(std::abs(r0.integral_route) < 1e-12);

  // random invertible Hermitian elements, two chi families
  RandomSuite rnd(301);
  auto chi3_line = FunctionSpec::compose_with_bounded_transform(NormalizingFunction::chi_p(3.0));
  for (int rep = 0; rep < 10; ++rep) {
    auto alg = rnd.random_block_algebra(1, 2, 8);
    Element d = rnd.random_hermitian_element(alg);
    if (smallest_singular_value(d) < 0.05) continue;
    for (const auto& chi : {chi_e_line, chi3_line}) {
      auto r = endpoint_defect(d, chi, cfg);
      CHECK(r.discrepancy < 1e-6);
    }
  }
}

TEST_CASE("heat formula on the scalar path -2 -> 3 equals one") {
  QuadratureConfig cfg;
  auto path = scalar_linear_path(-2.0, 3.0);
  auto r = sf_heat(path, cfg);
  // oracle: (1/2)(erf 3 - erf(-2)) + (1/2) erfc(3) + (1/2) erfc(2) = 1
  double oracle = 0.5 * (std::erf(3.0) - std::erf(-2.0)) + 0.5 * std::erfc(3.0) +
                  0.5 * std::erfc(2.0);
  CHECK(oracle == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(r.value - 1.0) < 1e-8);
  CHECK(r.endpoint_route_discrepancy < 1e-7);
}

TEST_CASE("heat formula vanishes on an invertible scalar path") {
  QuadratureConfig cfg;
  auto r = sf_heat(scalar_linear_path(1.0, 2.0), cfg);
  CHECK(std::abs(r.value) < 1e-8);
}

TEST_CASE("resolvent-power formula with p = 2 on the scalar path -2 -> 3") {
  QuadratureConfig cfg;
  auto r = sf_resolvent_power(scalar_linear_path(-2.0, 3.0), 2.0, cfg);
  // oracle: (1/2)[x/sqrt(1+x^2)] + defects = 1 by the elementary antiderivative
  double bt3 = 3.0 / std::sqrt(10.0), bt2 = 2.0 / std::sqrt(5.0);
  double oracle = 0.5 * (bt3 + bt2) + 0.5 * (1.0 - bt3) + 0.5 * (1.0 - bt2);
  CHECK(oracle == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(r.value - 1.0) < 1e-8);

  auto r0 = sf_resolvent_power(scalar_linear_path(0.5, 2.5), 2.0, cfg);
  CHECK(std::abs(r0.value) < 1e-8);
}

TEST_CASE("chi integral formula on bounded transforms of a scalar path") {
  QuadratureConfig cfg;
  auto path = bounded_transform_path(scalar_linear_path(-2.0, 3.0));
  auto r = sf_integral_chi(path, NormalizingFunction::chi_e(), cfg);
  CHECK(std::abs(r.value - 1.0) < 1e-8);
  auto inv = sf_integral_chi(bounded_transform_path(scalar_linear_path(1.0, 2.0)),
                             NormalizingFunction::chi_e(), cfg);
  CHECK(std::abs(inv.value) < 1e-8);
}

TEST_CASE("integral formulas agree with the winding flow on random block paths") {
  RandomSuite rnd(307);
  QuadratureConfig cfg;
  for (int rep = 0; rep < 4; ++rep) {
    auto alg = rnd.random_block_algebra(2, 2, 8);
    auto path = rnd.random_invertible_path(alg, 0.1);
    double w = sf_winding(path, NormalizingFunction::smooth_gap(0.05), cfg).value;
    CHECK(std::abs(sf_heat(path, cfg).value - w) < 1e-6);
    auto fpath = bounded_transform_path(path);
    CHECK(std::abs(sf_integral_chi(fpath, NormalizingFunction::chi_e(), cfg).value - w) < 1e-6);
    for (double p : {1.0, 2.0, 3.0, 5.0})
      CHECK(std::abs(sf_resolvent_power(path, p, cfg).value - w) < 1e-6);
  }
}

TEST_CASE("scaling identity through the heat formula") {
  RandomSuite rnd(311);
  QuadratureConfig cfg;
  auto alg = rnd.random_block_algebra(2, 2, 6);
  auto path = rnd.random_invertible_path(alg, 0.1);
  double base = sf_heat(path, cfg).value;
  for (double s : {0.25, 4.0}) {
    double rs = std::sqrt(s);
    OperatorPath scaled(alg, [path, rs](double t, Side side) { return rs * path.value(t, side); },
                        [path, rs](double t, Side side) { return rs * path.derivative(t, side); });
    CHECK(std::abs(sf_heat(scaled, cfg).value - base) < 1e-7);
  }
}

TEST_CASE("trace identity from the winding phase derivative") {
  // tau(e^{-i pi (chi(F)+1)} d/dt f(F_t)) = i pi tau((dF/dt) chi'(F)),
  // f = e^{i pi (chi+1)} - 1: exact in finite dimensions
  RandomSuite rnd(313);
  auto chi = NormalizingFunction::smooth_gap(0.35);
  auto phase = FunctionSpec::winding_phase(chi);
  auto neg_phase = FunctionSpec::from_complex("neg_phase", [chi](double x) {
    return std::exp(Complex(0.0, -kPi * (chi.value(x) + 1.0)));
  });
  for (int rep = 0; rep < 10; ++rep) {
    auto alg = make_block_algebra({{4, rnd.uniform(0.1, 3.0)}});
    Element f = rnd.random_hermitian_element(alg, 0.4);
    Element fdot = rnd.random_hermitian_element(alg);
    Element lhs_inner = derivative_of_function(phase, f, fdot);
    Complex lhs = trace(func_calc(neg_phase, f) * lhs_inner);
    auto chi_prime = FunctionSpec::from_real("chi_prime",
                                             [chi](double x) { return chi.derivative(x); });
    Complex rhs = Complex(0.0, kPi) * trace(fdot * func_calc(chi_prime, f));
    CHECK(std::abs(lhs - rhs) < 1e-7);
  }
}

TEST_CASE("duhamel derivative agrees with divided differences") {
  RandomSuite rnd(317);
  QuadratureConfig cfg;
  cfg.tolerance = 1e-8;

  // compactly supported smooth bump covering [-1, 1]
  double radius = 2.0;
  auto bump = FunctionSpec::from_real(
      "bump",
      [radius](double x) {
        double s = x / radius;
        if (std::abs(s) >= 1.0) return 0.0;
        return std::exp(-1.0 / (1.0 - s * s));
      },
      [radius](double x) {
        double s = x / radius;
        if (std::abs(s) >= 1.0) return 0.0;
        double w = 1.0 - s * s;
        return std::exp(-1.0 / w) * (-2.0 * s / (w * w)) / radius;
      });
  auto fourier = fourier_data_of(bump, radius, cfg);

  // Fdot = 0 -> 0
  auto alg = make_block_algebra({{3, 1.0}});
  Element f = rnd.random_hermitian_element(alg, 0.25);
  CHECK(operator_norm(f) <= 1.0);
  Element zero = Element::zero(alg);
  CHECK(operator_norm(duhamel_derivative(bump, fourier, f, zero, cfg)) < 1e-9);

  // commuting pair: g'(F) Fdot
  Matrix diag = Matrix::Zero(3, 3);
  diag(0, 0) = Complex(0.3, 0.0);
  diag(1, 1) = Complex(-0.5, 0.0);
  diag(2, 2) = Complex(0.8, 0.0);
  Element fd = Element::from_blocks(alg, {diag}, true);
  Element fdot_c = Element::from_blocks(alg, {(0.5 * diag).eval()}, true);
  Element viaduhamel = duhamel_derivative(bump, fourier, fd, fdot_c, cfg);
  Element collapsed = func_calc(FunctionSpec::from_real("gprime",
                                                        [&bump](double x) {
                                                          return bump.derivative(x).real();
                                                        }),
                                fd) *
                      fdot_c;
  CHECK(distance(viaduhamel, collapsed) < 1e-6);

  // random pair: against the divided-difference rule
  Element fdot = rnd.random_hermitian_element(alg);
  Element via_dd = derivative_of_function(bump, f, fdot);
  Element via_duhamel = duhamel_derivative(bump, fourier, f, fdot, cfg);
  CHECK(distance(via_duhamel, via_dd) < 1e-6);
}
