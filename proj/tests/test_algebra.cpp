#include <doctest.h>

#include <cmath>

#include "specflow/algebra.hpp"
#include "specflow/random_suite.hpp"

using namespace specflow;

TEST_CASE("weighted block trace") {
  auto alg = make_block_algebra({{2, 1.5}});
  CHECK(trace(Element::identity(alg)).real() == doctest::Approx(3.0).epsilon(1e-14));

  auto alg2 = make_block_algebra({{1, 0.5}, {1, 2.0}});
  Matrix a(1, 1), b(1, 1);
  a << Complex(3.0, 0.0);
  b << Complex(4.0, 0.0);
  Element d = Element::from_blocks(alg2, {a, b}, true);
  CHECK(trace(d).real() == doctest::Approx(9.5).epsilon(1e-14));
}

TEST_CASE("block construction errors") {
  CHECK_THROWS_AS(make_block_algebra({{0, 1.0}}), ValidationError);
  CHECK_THROWS_AS(make_block_algebra({{2, -1.0}}), ValidationError);
  CHECK_THROWS_AS(make_block_algebra({{2, 0.0}}), ValidationError);
}

TEST_CASE("grid trace and errors") {
  std::vector<double> pts(100), wts(100, 0.1);
  for (int i = 0; i < 100; ++i) pts[i] = i * 0.01;
  auto grid = make_grid_algebra(pts, wts);
  CHECK(trace(Element::identity(grid)).real() == doctest::Approx(10.0).epsilon(1e-13));
  CHECK(trace(Element::zero(grid)).real() == 0.0);

  std::vector<Complex> v(100, Complex(0.0, 0.0));
  v[17] = Complex(1.0 / 0.1, 0.0);
  CHECK(trace(Element::from_grid(grid, v, true)).real() == doctest::Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS(make_grid_algebra({0.0, 0.0}, {1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(make_grid_algebra({0.0, 1.0}, {1.0, -0.5}), ValidationError);
}

TEST_CASE("traciality on random pairs, both backends") {
  RandomSuite rnd(11);
  auto block = rnd.random_block_algebra(2, 3, 10);
  for (int i = 0; i < 200; ++i) {
    Element a = rnd.random_element(block);
    Element b = rnd.random_element(block);
    double bound = 1e-12 * operator_norm(a) * operator_norm(b) * block->trace_of_identity();
    CHECK(std::abs(trace(a * b) - trace(b * a)) <= bound + 1e-14);
  }
  auto grid = make_grid_algebra({-1.0, 0.3, 2.0}, {0.5, 1.0, 0.25});
  for (int i = 0; i < 200; ++i) {
    Element a = rnd.random_element(grid);
    Element b = rnd.random_element(grid);
    double bound = 1e-12 * operator_norm(a) * operator_norm(b) * grid->trace_of_identity();
    CHECK(std::abs(trace(a * b) - trace(b * a)) <= bound + 1e-14);
  }
}

TEST_CASE("hermitian trace is real") {
  RandomSuite rnd(5);
  auto alg = rnd.random_block_algebra(2, 3, 12);
  for (int i = 0; i < 20; ++i) {
    Element a = rnd.random_hermitian_element(alg);
    CHECK(std::abs(trace(a).imag()) <= 1e-14 * l1_norm(a));
  }
}

TEST_CASE("norms") {
  auto alg = make_block_algebra({{1, 2.0}});
  Matrix m(1, 1);
  m << Complex(-3.0, 0.0);
  Element a = Element::from_blocks(alg, {m}, true);
  CHECK(l1_norm(a) == doctest::Approx(9.0).epsilon(1e-14));  // 3 + 2*3
  CHECK(l1_norm(Element::zero(alg)) == 0.0);
  CHECK(operator_norm(a) == doctest::Approx(3.0));
  CHECK(lp_norm(a, 2.0) == doctest::Approx(3.0 + std::sqrt(2.0 * 9.0)).epsilon(1e-12));

  // ||SAT||_1 <= ||S|| ||A||_1 ||T|| on random triples
  RandomSuite rnd(7);
  auto alg2 = rnd.random_block_algebra(2, 2, 8);
  for (int i = 0; i < 50; ++i) {
    Element s = rnd.random_element(alg2);
    Element x = rnd.random_element(alg2);
    Element t = rnd.random_element(alg2);
    CHECK(l1_norm(s * x * t) <=
          operator_norm(s) * l1_norm(x) * operator_norm(t) * (1.0 + 1e-12) + 1e-12);
  }
}

TEST_CASE("Hoelder-type inequality |tau(AB)| <= ||A|| tau(|B|)") {
  RandomSuite rnd(13);
  auto alg = rnd.random_block_algebra(2, 3, 10);
  for (int i = 0; i < 100; ++i) {
    Element a = rnd.random_element(alg);
    Element b = rnd.random_element(alg);
    CHECK(std::abs(trace(a * b)) <= operator_norm(a) * trace_norm(b) * (1.0 + 1e-12) + 1e-12);
  }
}

TEST_CASE("functional calculus basics") {
  auto alg = make_block_algebra({{2, 1.0}});
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = Complex(1.0, 0.0);
  m(1, 1) = Complex(-2.0, 0.0);
  Element a = Element::from_blocks(alg, {m}, true);

  Element same = func_calc(FunctionSpec::identity(), a);
  CHECK(distance(same, a) < 1e-14);

  Element sq = func_calc(FunctionSpec::from_real("square", [](double x) { return x * x; }), a);
  Matrix expect = Matrix::Zero(2, 2);
  expect(0, 0) = Complex(1.0, 0.0);
  expect(1, 1) = Complex(4.0, 0.0);
  CHECK((sq.blocks()[0] - expect).norm() < 1e-13);
}

TEST_CASE("indicator counts zero as nonnegative") {
  double c = 0.7;
  auto alg = make_block_algebra({{3, c}});
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = Complex(-1.0, 0.0);
  m(1, 1) = Complex(0.0, 0.0);
  m(2, 2) = Complex(2.0, 0.0);
  Element a = Element::from_blocks(alg, {m}, true);
  Element p = func_calc(FunctionSpec::nonnegative_indicator(), a);
  CHECK(trace(p).real() == doctest::Approx(2.0 * c).epsilon(1e-13));
}

TEST_CASE("functional calculus is multiplicative on polynomials") {
  RandomSuite rnd(23);
  auto alg = rnd.random_block_algebra(2, 3, 10);
  auto poly = [](std::vector<double> cs) {
    return FunctionSpec::from_real("poly", [cs](double x) {
      double v = 0.0;
      for (auto it = cs.rbegin(); it != cs.rend(); ++it) v = v * x + *it;
      return v;
    });
  };
  for (int i = 0; i < 25; ++i) {
    std::vector<double> c1{rnd.uniform(-1, 1), rnd.uniform(-1, 1), rnd.uniform(-1, 1)};
    std::vector<double> c2{rnd.uniform(-1, 1), rnd.uniform(-1, 1)};
    // product polynomial coefficients
    std::vector<double> cp(c1.size() + c2.size() - 1, 0.0);
    for (std::size_t u = 0; u < c1.size(); ++u)
      for (std::size_t v = 0; v < c2.size(); ++v) cp[u + v] += c1[u] * c2[v];
    Element a = rnd.random_hermitian_element(alg);
    Element lhs = func_calc(poly(cp), a);
    Element rhs = func_calc(poly(c1), a) * func_calc(poly(c2), a);
    CHECK(distance(lhs, rhs) < 1e-10 * (1.0 + operator_norm(lhs)));
  }
}

TEST_CASE("bounded transform") {
  auto alg = make_block_algebra({{1, 1.0}});
  CHECK(distance(bounded_transform(Element::zero(alg)), Element::zero(alg)) == 0.0);
  Matrix one(1, 1);
  one << Complex(1.0, 0.0);
  Element d = Element::from_blocks(alg, {one}, true);
  CHECK(std::abs(bounded_transform(d).blocks()[0](0, 0).real() - 1.0 / std::sqrt(2.0)) < 1e-14);

  // grid pole marker maps to the limit 1
  auto grid = make_grid_algebra({0.0, 1.0}, {1.0, 1.0});
  Element g = Element::from_grid_extended(grid, {Complex(2.0, 0.0), Complex(0.0, 0.0)},
                                          {Pole::kNone, Pole::kPlus}, true);
  Element f = bounded_transform(g);
  CHECK(f.grid_values()[1].real() == doctest::Approx(1.0));

  // norm stays within 1 + 1e-12 on random Hermitian elements
  RandomSuite rnd(3);
  auto alg2 = rnd.random_block_algebra(2, 3, 12);
  for (int i = 0; i < 30; ++i) {
    Element x = rnd.random_hermitian_element(alg2, 3.0);
    CHECK(operator_norm(bounded_transform(x)) <= 1.0 + 1e-12);
  }
}

TEST_CASE("pole markers forbid traces and norms") {
  auto grid = make_grid_algebra({0.0, 1.0}, {1.0, 1.0});
  Element g = Element::from_grid_extended(grid, {Complex(2.0, 0.0), Complex(0.0, 0.0)},
                                          {Pole::kNone, Pole::kPlus}, true);
  CHECK_THROWS_AS(trace(g), NumericalError);
  CHECK_THROWS_AS(l1_norm(g), NumericalError);
  // func_calc with undefined limit errors
  auto square = FunctionSpec::from_real("square", [](double x) { return x * x; });
  CHECK_THROWS_AS(func_calc(square, g), ValidationError);
}

TEST_CASE("hermiticity is enforced and symmetrized") {
  auto alg = make_block_algebra({{2, 1.0}});
  Matrix m(2, 2);
  m << Complex(1.0, 0.0), Complex(0.5, 0.2), Complex(0.5, -0.2 + 1e-15), Complex(2.0, 0.0);
  Element a = Element::from_blocks(alg, {m}, true);
  CHECK((a.blocks()[0] - a.blocks()[0].adjoint()).norm() == 0.0);

  Matrix bad(2, 2);
  bad << Complex(1.0, 0.0), Complex(0.5, 0.2), Complex(0.1, 0.0), Complex(2.0, 0.0);
  CHECK_THROWS_AS(Element::from_blocks(alg, {bad}, true), ValidationError);
}

TEST_CASE("divided-difference derivative matches central finite differences") {
  RandomSuite rnd(31);
  auto g = FunctionSpec::from_real(
      "cube_plus", [](double x) { return x * x * x + std::sin(x); },
      [](double x) { return 3.0 * x * x + std::cos(x); });
  for (int rep = 0; rep < 12; ++rep) {
    auto alg = rnd.random_block_algebra(1, 2, 8);
    Element f = rnd.random_hermitian_element(alg);
    Element fdot = rnd.random_hermitian_element(alg);
    Element analytic = derivative_of_function(g, f, fdot);
    double h = 1e-5;
    Element fd = (0.5 / h) * (func_calc(g, f + h * fdot) - func_calc(g, f - h * fdot));
    CHECK(distance(analytic, fd) <= 1e-5 * std::max(1.0, operator_norm(analytic)));
  }
}

TEST_CASE("divided difference of the square gives eigenvalue sums") {
  auto alg = make_block_algebra({{2, 1.0}});
  Matrix f = Matrix::Zero(2, 2);
  f(0, 0) = Complex(1.0, 0.0);
  f(1, 1) = Complex(3.0, 0.0);
  Matrix fd(2, 2);
  fd << Complex(0.2, 0.0), Complex(0.3, 0.1), Complex(0.3, -0.1), Complex(-0.4, 0.0);
  auto g = FunctionSpec::from_real("square", [](double x) { return x * x; },
                                   [](double x) { return 2.0 * x; });
  Element r = derivative_of_function(g, Element::from_blocks(alg, {f}, true),
                                     Element::from_blocks(alg, {fd}, true));
  // entries (l_i + l_j) * fdot_ij
  CHECK(std::abs(r.blocks()[0](0, 0) - Complex(0.4, 0.0)) < 1e-13);
  CHECK(std::abs(r.blocks()[0](0, 1) - 4.0 * Complex(0.3, 0.1)) < 1e-13);
  CHECK(std::abs(r.blocks()[0](1, 1) - 6.0 * Complex(-0.4, 0.0)) < 1e-13);
}

TEST_CASE("identity function passes the derivative through") {
  RandomSuite rnd(41);
  auto alg = rnd.random_block_algebra(2, 2, 6);
  Element f = rnd.random_hermitian_element(alg);
  Element fdot = rnd.random_hermitian_element(alg);
  CHECK(distance(derivative_of_function(FunctionSpec::identity(), f, fdot), fdot) < 1e-12);
}
