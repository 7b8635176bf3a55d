#include "specflow/selfcheck.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "specflow/gallery.hpp"
#include "specflow/integral_formulas.hpp"
#include "specflow/random_suite.hpp"
#include "specflow/spectral_flow.hpp"

namespace specflow {

namespace {

struct Checker {
  std::ostream& out;
  int failures = 0;

  void report(const std::string& name, double deviation, double bound) {
    char line[160];
    bool ok = deviation <= bound;
    std::snprintf(line, sizeof(line), "%-46s deviation=%.3e bound=%.3e %s\n", name.c_str(),
                  deviation, bound, ok ? "PASS" : "FAIL");
    out << line;
    if (!ok) ++failures;
  }

  void guarded(const std::string& name, double bound, const std::function<double()>& worst) {
    try {
      report(name, worst(), bound);
    } catch (const std::exception& e) {
      out << name << " threw: " << e.what() << " FAIL\n";
      ++failures;
    }
  }
};

OperatorPath scalar_path(double a, double b, double weight = 1.0) {
  auto alg = make_block_algebra({{1, weight}});
  Matrix ma(1, 1), mb(1, 1);
  ma << Complex(a, 0.0);
  mb << Complex(b, 0.0);
  return make_linear_path(Element::from_blocks(alg, {ma}, true),
                          Element::from_blocks(alg, {mb}, true));
}

}  // namespace

int run_selfcheck(std::uint64_t seed, SelfcheckBudget budget, std::ostream& out) {
  const bool full = budget == SelfcheckBudget::kFull;
  const int pairs = full ? 200 : 40;
  const int paths = full ? 20 : 4;
  const int cases = full ? 20 : 6;
  QuadratureConfig quad;
  Checker check{out};

  out << "selfcheck seed=" << seed << " budget=" << (full ? "full" : "small") << "\n";

  // -- algebra core -------------------------------------------------------
  check.guarded("algebra.traciality.block", 1e-12, [&] {
    RandomSuite rnd(seed + 1);
    auto alg = rnd.random_block_algebra(2, 3, 12);
    double worst = 0.0;
    for (int i = 0; i < pairs; ++i) {
      Element a = rnd.random_element(alg);
      Element b = rnd.random_element(alg);
      double scale = operator_norm(a) * operator_norm(b) * alg->trace_of_identity();
      worst = std::max(worst, std::abs(trace(a * b) - trace(b * a)) / std::max(scale, 1e-30));
    }
    return worst;
  });

  check.guarded("algebra.traciality.grid", 1e-12, [&] {
    RandomSuite rnd(seed + 2);
    auto grid = make_grid_algebra({-2.0, -0.5, 0.1, 1.4}, {0.3, 1.0, 0.7, 2.0});
    double worst = 0.0;
    for (int i = 0; i < pairs; ++i) {
      Element a = rnd.random_element(grid);
      Element b = rnd.random_element(grid);
      double scale = operator_norm(a) * operator_norm(b) * grid->trace_of_identity();
      worst = std::max(worst, std::abs(trace(a * b) - trace(b * a)) / std::max(scale, 1e-30));
    }
    return worst;
  });

  check.guarded("algebra.functional_calculus.multiplicative", 1e-10, [&] {
    RandomSuite rnd(seed + 3);
    auto alg = rnd.random_block_algebra(2, 3, 10);
    double worst = 0.0;
    for (int i = 0; i < cases; ++i) {
      double c0 = rnd.uniform(-1, 1), c1 = rnd.uniform(-1, 1), d0 = rnd.uniform(-1, 1);
      auto f = FunctionSpec::from_real("f", [=](double x) { return c0 + c1 * x * x; });
      auto g = FunctionSpec::from_real("g", [=](double x) { return d0 + x; });
      auto fg = FunctionSpec::from_real("fg", [=](double x) {
        return (c0 + c1 * x * x) * (d0 + x);
      });
      Element a = rnd.random_hermitian_element(alg);
      worst = std::max(worst, distance(func_calc(fg, a), func_calc(f, a) * func_calc(g, a)) /
                                  std::max(1.0, operator_norm(a)));
    }
    return worst;
  });

  check.guarded("algebra.hoelder", 1e-12, [&] {
    RandomSuite rnd(seed + 4);
    auto alg = rnd.random_block_algebra(2, 3, 10);
    double worst = 0.0;
    for (int i = 0; i < pairs; ++i) {
      Element a = rnd.random_element(alg);
      Element b = rnd.random_element(alg);
      double lhs = std::abs(trace(a * b));
      double rhs = operator_norm(a) * trace_norm(b);
      worst = std::max(worst, (lhs - rhs) / std::max(rhs, 1e-30));
    }
    return std::max(worst, 0.0);
  });

  check.guarded("algebra.sandwich_l1", 1e-12, [&] {
    RandomSuite rnd(seed + 5);
    auto alg = rnd.random_block_algebra(2, 2, 8);
    double worst = 0.0;
    for (int i = 0; i < pairs / 2; ++i) {
      Element s = rnd.random_element(alg);
      Element a = rnd.random_element(alg);
      Element t = rnd.random_element(alg);
      double lhs = l1_norm(s * a * t);
      double rhs = operator_norm(s) * l1_norm(a) * operator_norm(t);
      worst = std::max(worst, (lhs - rhs) / std::max(rhs, 1e-30));
    }
    return std::max(worst, 0.0);
  });

  check.guarded("algebra.divided_difference_vs_fd", 1e-5, [&] {
    RandomSuite rnd(seed + 6);
    auto g = FunctionSpec::from_real(
        "smooth", [](double x) { return x * x * x + std::sin(x); },
        [](double x) { return 3.0 * x * x + std::cos(x); });
    double worst = 0.0;
    for (int i = 0; i < cases; ++i) {
      auto alg = rnd.random_block_algebra(1, 2, 8);
      Element f = rnd.random_hermitian_element(alg);
      Element fdot = rnd.random_hermitian_element(alg);
      Element analytic = derivative_of_function(g, f, fdot);
      double h = 1e-5;
      Element fd = (0.5 / h) * (func_calc(g, f + h * fdot) - func_calc(g, f - h * fdot));
      worst = std::max(worst, distance(analytic, fd) / std::max(1.0, operator_norm(analytic)));
    }
    return worst;
  });

  check.guarded("algebra.bounded_transform_contraction", 1e-12, [&] {
    RandomSuite rnd(seed + 7);
    auto alg = rnd.random_block_algebra(2, 3, 12);
    double worst = 0.0;
    for (int i = 0; i < cases; ++i)
      worst = std::max(worst,
                       operator_norm(bounded_transform(rnd.random_hermitian_element(alg, 4.0))) -
                           1.0);
    return std::max(worst, 0.0);
  });

  // -- winding -------------------------------------------------------------
  auto projection_loop = [](const AlgebraPtr& alg, const Element& p) {
    InvertibleLoop loop;
    loop.closed = true;
    Element one = Element::identity(alg);
    loop.value = [p, one](double t, Side) {
      return std::exp(Complex(0.0, 2.0 * kPi * t)) * p + (one - p);
    };
    loop.derivative = [p](double t, Side) {
      return Complex(0.0, 2.0 * kPi) * std::exp(Complex(0.0, 2.0 * kPi * t)) * p;
    };
    return loop;
  };

  check.guarded("winding.constant_multiplier_invariance", 1e-8, [&] {
    RandomSuite rnd(seed + 8);
    double worst = 0.0;
    for (int i = 0; i < cases; ++i) {
      auto alg = rnd.random_block_algebra(2, 2, 8);
      auto base = projection_loop(alg, Element::identity(alg));
      double w0 = winding_number(base, quad).value;
      Element u = Element::identity(alg) + 0.4 * rnd.random_element(alg, 0.25);
      InvertibleLoop right = base;
      right.value = [base, u](double t, Side s) { return base.value(t, s) * u; };
      right.derivative = [base, u](double t, Side s) { return base.derivative(t, s) * u; };
      InvertibleLoop left = base;
      left.value = [base, u](double t, Side s) { return u * base.value(t, s); };
      left.derivative = [base, u](double t, Side s) { return u * base.derivative(t, s); };
      worst = std::max({worst, std::abs(winding_number(right, quad).value - w0),
                        std::abs(winding_number(left, quad).value - w0)});
    }
    return worst;
  });

  check.guarded("winding.conjugation_invariance", 1e-8, [&] {
    RandomSuite rnd(seed + 9);
    double worst = 0.0;
    for (int i = 0; i < cases; ++i) {
      auto alg = rnd.random_block_algebra(2, 2, 8);
      auto base = projection_loop(alg, Element::identity(alg));
      double w0 = winding_number(base, quad).value;
      Element v = rnd.random_element(alg) + 3.0 * Element::identity(alg);
      Element vinv = v.inverse();
      InvertibleLoop conj = base;
      conj.value = [base, v, vinv](double t, Side s) { return vinv * base.value(t, s) * v; };
      conj.derivative = [base, v, vinv](double t, Side s) {
        return vinv * base.derivative(t, s) * v;
      };
      worst = std::max(worst, std::abs(winding_number(conj, quad).value - w0));
    }
    return worst;
  });

  check.guarded("winding.reparameterization", 1e-7, [&] {
    auto alg = make_block_algebra({{3, 0.25}});
    auto base = projection_loop(alg, Element::identity(alg));
    InvertibleLoop repar;
    repar.closed = true;
    repar.value = [base](double t, Side s) { return base.value(t * t, s); };
    return std::abs(winding_number(repar, quad).value - winding_number(base, quad).value);
  });

  check.guarded("winding.product_homomorphism", 1e-7, [&] {
    RandomSuite rnd(seed + 10);
    double worst = 0.0;
    auto alg = make_block_algebra({{2, 0.6}, {1, 1.3}});
    for (int i = 0; i < cases; ++i) {
      int na = rnd.uniform_int(-2, 2), nb = rnd.uniform_int(-2, 2);
      auto make = [&alg](int n) {
        InvertibleLoop loop;
        loop.closed = true;
        loop.value = [&alg, n](double t, Side) {
          std::vector<Matrix> blocks;
          blocks.push_back(std::exp(Complex(0.0, 2.0 * kPi * n * t)) * Matrix::Identity(2, 2));
          blocks.push_back(Matrix::Identity(1, 1));
          return Element::from_blocks(alg, blocks, false);
        };
        return loop;
      };
      auto la = make(na), lb = make(nb);
      InvertibleLoop prod;
      prod.closed = true;
      prod.value = [la, lb](double t, Side s) { return la.value(t, s) * lb.value(t, s); };
      worst = std::max(worst, std::abs(winding_number(prod, quad).value -
                                       winding_number(la, quad).value -
                                       winding_number(lb, quad).value));
    }
    return worst;
  });

  check.guarded("winding.rectangle_defect", 1e-6, [&] {
    RandomSuite rnd(seed + 11);
    auto alg4 = make_block_algebra({{4, 0.8}});
    Element a1 = rnd.random_element(alg4, 0.18);
    Element a2 = rnd.random_element(alg4, 0.18);
    Element a3 = rnd.random_element(alg4, 0.12);
    RectangleFamily h{0.0, 1.0, 0.0, 1.0, [=](double x, double y) {
                        return Element::identity(alg4) + x * a1 + y * a2 + (x * y) * a3;
                      }};
    return std::abs(rectangle_defect(h, quad));
  });

  // -- spectral flow -------------------------------------------------------
  check.guarded("specflow.method_agreement", 1e-6, [&] {
    RandomSuite rnd(seed + 12);
    double worst = 0.0;
    for (int i = 0; i < paths; ++i) {
      auto alg = rnd.random_block_algebra(2, 3, 12);
      auto path = rnd.random_invertible_path(alg, 0.08);
      double w = sf_winding(path, NormalizingFunction::smooth_gap(0.05), quad).value;
      double c = sf_crossing(path).value;
      double a = sf_analytic(path, uniform_partition(64)).value;
      worst = std::max({worst, std::abs(w - c), std::abs(w - a)});
    }
    return worst;
  });

  check.guarded("specflow.normalizing_independence", 1e-7, [&] {
    RandomSuite rnd(seed + 13);
    auto alg = rnd.random_block_algebra(2, 3, 10);
    auto path = rnd.random_invertible_path(alg, 0.1);
    double w1 = sf_winding(path, NormalizingFunction::smooth_gap(0.04), quad).value;
    double w2 = sf_winding(path, NormalizingFunction::smooth_gap(0.09), quad).value;
    return std::abs(w1 - w2);
  });

  check.guarded("specflow.homotopy_invariance", 1e-6, [&] {
    RandomSuite rnd(seed + 14);
    double worst = 0.0;
    for (int i = 0; i < std::max(2, paths / 2); ++i) {
      auto alg = rnd.random_block_algebra(2, 2, 8);
      auto p = rnd.random_invertible_path(alg, 0.1);
      Element bump = rnd.random_hermitian_element(alg, 0.8);
      OperatorPath q(alg,
                     [p, bump](double t, Side s) { return p.value(t, s) + (t * (1 - t)) * bump; },
                     [p, bump](double t, Side s) {
                       return p.derivative(t, s) + (1 - 2 * t) * bump;
                     });
      auto chi = NormalizingFunction::smooth_gap(0.05);
      worst = std::max(worst,
                       std::abs(sf_winding(p, chi, quad).value - sf_winding(q, chi, quad).value));
    }
    return worst;
  });

  check.guarded("specflow.invertible_path_vanishes", 1e-8, [&] {
    auto path = scalar_path(1.0, 2.0);
    return std::abs(sf_winding(path, NormalizingFunction::smooth_gap(0.4), quad).value);
  });

  check.guarded("specflow.positive_scaling_exact", 0.0, [&] {
    RandomSuite rnd(seed + 15);
    auto alg = rnd.random_block_algebra(2, 2, 8);
    auto p = rnd.random_invertible_path(alg, 0.1);
    double base = sf_crossing(p).value;
    double worst = 0.0;
    for (double c : {0.1, 10.0}) {
      OperatorPath scaled(alg, [p, c](double t, Side s) { return c * p.value(t, s); },
                          [p, c](double t, Side s) { return c * p.derivative(t, s); });
      worst = std::max(worst, std::abs(sf_crossing(scaled).value - base));
    }
    return worst;
  });

  check.guarded("specflow.concat_reverse", 1e-8, [&] {
    RandomSuite rnd(seed + 16);
    auto alg = rnd.random_block_algebra(2, 2, 8);
    auto p = rnd.random_invertible_path(alg, 0.1);
    double direct = sf_crossing(p).value;
    double reversed = sf_crossing(reverse(p)).value;
    double looped = sf_crossing(concat(p, reverse(p))).value;
    return std::max(std::abs(direct + reversed), std::abs(looped));
  });

  check.guarded("specflow.conjugation_invariance", 1e-7, [&] {
    RandomSuite rnd(seed + 17);
    auto alg = rnd.random_block_algebra(2, 2, 8);
    auto p = rnd.random_invertible_path(alg, 0.1);
    Element h = rnd.random_hermitian_element(alg);
    auto unitary = [alg, h](double t) {
      auto rot = FunctionSpec::from_complex(
          "rot", [t](double x) { return std::exp(Complex(0.0, t * x)); });
      return func_calc(rot, h);
    };
    auto chi = NormalizingFunction::smooth_gap(0.05);
    return std::abs(sf_winding(conjugate(p, unitary), chi, quad).value -
                    sf_winding(p, chi, quad).value);
  });

  check.guarded("specflow.projection_perturbation_bound", 0.0, [&] {
    RandomSuite rnd(seed + 18);
    auto step = FunctionSpec::nonnegative_indicator();
    auto sign = FunctionSpec::from_real("sign", [](double x) { return x >= 0.0 ? 1.0 : -1.0; });
    double worst = -1.0;
    for (int i = 0; i < cases; ++i) {
      auto alg = rnd.random_block_algebra(1, 2, 8);
      Element f = func_calc(sign, rnd.random_hermitian_element(alg));
      Element a = rnd.random_hermitian_element(alg);
      a = (rnd.uniform(0.05, 0.49) / operator_norm(a)) * a;
      double lhs = operator_norm(func_calc(step, f + a) - func_calc(step, f));
      worst = std::max(worst, lhs - 2.0 * operator_norm(a));  // must stay strictly negative
    }
    return worst >= 0.0 ? worst + 1.0 : 0.0;
  });

  // -- index and suspension -------------------------------------------------
  check.guarded("index.suspension_equals_index", 1e-8, [&] {
    RandomSuite rnd(seed + 19);
    double worst = 0.0;
    for (int i = 0; i < std::max(4, paths); ++i) {
      int dim = rnd.uniform_int(3, 6);
      int rq = rnd.uniform_int(0, dim);
      int rp = rnd.uniform_int(0, dim);
      int rop = rnd.uniform_int(0, std::min(rq, rp));
      auto corner = rnd.random_corner(dim, rq, rp, rop, rnd.uniform(0.1, 3.0));
      double ind = breuer_index(corner).value;
      double sf =
          sf_winding(suspension_path(corner), NormalizingFunction::smooth_gap(0.25), quad).value;
      worst = std::max(worst, std::abs(sf - ind));
    }
    return worst;
  });

  check.guarded("index.adjoint_antisymmetry", 0.0, [&] {
    RandomSuite rnd(seed + 20);
    double worst = 0.0;
    for (int i = 0; i < cases; ++i) {
      auto corner = rnd.random_corner(5, rnd.uniform_int(0, 5), rnd.uniform_int(0, 5), 2,
                                      rnd.uniform(0.1, 3.0));
      auto swapped = make_corner_operator(corner.op.adjoint(), corner.source, corner.target);
      worst = std::max(worst, std::abs(breuer_index(swapped).value + breuer_index(corner).value));
    }
    return worst;
  });

  check.guarded("index.direct_sum_additivity", 0.0, [&] {
    RandomSuite rnd(seed + 21);
    auto a1 = rnd.random_corner(4, 3, 2, 1, 0.7);
    auto a2 = rnd.random_corner(3, 1, 1, 1, 1.3);
    auto alg = make_block_algebra({{4, 0.7}, {3, 1.3}});
    auto embed = [&alg](const Element& x, const Element& y, bool herm) {
      return Element::from_blocks(alg, {x.blocks()[0], y.blocks()[0]}, herm);
    };
    auto sum = make_corner_operator(embed(a1.op, a2.op, false), embed(a1.target, a2.target, true),
                                    embed(a1.source, a2.source, true));
    return std::abs(breuer_index(sum).value - breuer_index(a1).value - breuer_index(a2).value);
  });

  // -- integral formulas ----------------------------------------------------
  check.guarded("integral.four_way_agreement", 1e-6, [&] {
    RandomSuite rnd(seed + 22);
    double worst = 0.0;
    for (int i = 0; i < std::max(2, paths / 2); ++i) {
      auto alg = rnd.random_block_algebra(2, 2, 8);
      auto path = rnd.random_invertible_path(alg, 0.1);
      double w = sf_winding(path, NormalizingFunction::smooth_gap(0.05), quad).value;
      worst = std::max(worst, std::abs(sf_heat(path, quad).value - w));
      worst = std::max(
          worst,
          std::abs(sf_integral_chi(bounded_transform_path(path), NormalizingFunction::chi_e(), quad)
                       .value -
                   w));
      worst = std::max(worst, std::abs(sf_resolvent_power(path, 2.0, quad).value - w));
    }
    return worst;
  });

  check.guarded("integral.heat_scaling_identity", 1e-7, [&] {
    RandomSuite rnd(seed + 23);
    auto alg = rnd.random_block_algebra(2, 2, 6);
    auto path = rnd.random_invertible_path(alg, 0.1);
    double base = sf_heat(path, quad).value;
    double worst = 0.0;
    for (double s : {0.25, 4.0}) {
      double rs = std::sqrt(s);
      OperatorPath scaled(alg, [path, rs](double t, Side si) { return rs * path.value(t, si); },
                          [path, rs](double t, Side si) { return rs * path.derivative(t, si); });
      worst = std::max(worst, std::abs(sf_heat(scaled, quad).value - base));
    }
    return worst;
  });

  check.guarded("integral.normalizing_shape_chi_e_chi_p", 1e-10, [&] {
    double worst = 0.0;
    for (const auto& chi : {NormalizingFunction::chi_e(), NormalizingFunction::chi_p(2.0),
                            NormalizingFunction::chi_p(3.0)}) {
      worst = std::max(worst, std::abs(chi.value(1.0) - 1.0));
      worst = std::max(worst, std::abs(chi.value(-1.0) + 1.0));
      double prev = -2.0;
      for (int i = 0; i <= 2000; ++i) {
        double x = -1.0 + 2.0 * i / 2000.0;
        double v = chi.value(x);
        worst = std::max(worst, std::abs(v + chi.value(-x)));
        worst = std::max(worst, prev - v);
        prev = v;
      }
    }
    return worst;
  });

  check.guarded("integral.defect_vanishes_for_involution", 0.0, [&] {
    auto gap = FunctionSpec::from_normalizing(NormalizingFunction::smooth_gap(0.3));
    auto alg = make_block_algebra({{2, 1.4}});
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = Complex(1.5, 0.0);
    m(1, 1) = Complex(-0.8, 0.0);
    auto r = endpoint_defect(Element::from_blocks(alg, {m}, true), gap, quad);
    return std::abs(r.direct);
  });

  check.guarded("integral.defect_two_routes", 1e-6, [&] {
    RandomSuite rnd(seed + 24);
    auto chi_e_line = FunctionSpec::compose_with_bounded_transform(NormalizingFunction::chi_e());
    double worst = 0.0;
    for (int i = 0; i < cases; ++i) {
      auto alg = rnd.random_block_algebra(1, 2, 8);
      Element d = rnd.random_hermitian_element(alg);
      if (smallest_singular_value(d) < 0.05) continue;
      worst = std::max(worst, endpoint_defect(d, chi_e_line, quad).discrepancy);
    }
    return worst;
  });

  check.guarded("integral.trace_identity", 1e-7, [&] {
    RandomSuite rnd(seed + 25);
    auto chi = NormalizingFunction::smooth_gap(0.35);
    auto phase = FunctionSpec::winding_phase(chi);
    auto neg_phase = FunctionSpec::from_complex("neg_phase", [chi](double x) {
      return std::exp(Complex(0.0, -kPi * (chi.value(x) + 1.0)));
    });
    auto chi_prime =
        FunctionSpec::from_real("chi_prime", [chi](double x) { return chi.derivative(x); });
    double worst = 0.0;
    for (int i = 0; i < cases; ++i) {
      auto alg = make_block_algebra({{4, rnd.uniform(0.1, 3.0)}});
      Element f = rnd.random_hermitian_element(alg, 0.4);
      Element fdot = rnd.random_hermitian_element(alg);
      Complex lhs = trace(func_calc(neg_phase, f) * derivative_of_function(phase, f, fdot));
      Complex rhs = Complex(0.0, kPi) * trace(fdot * func_calc(chi_prime, f));
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
  });

  check.guarded("integral.cp_constants", 1e-10, [&] {
    double worst = 0.0;
    for (double p : {1.0, 1.5, 2.0, 3.0, 5.0}) {
      auto c = cp_constant(p);
      worst = std::max(worst, std::abs(c.by_quadrature - c.by_gamma));
    }
    worst = std::max(worst, std::abs(NormalizingFunction::chi_e().normalization_constant() -
                                     0.5 * kSqrtPi));
    return worst;
  });

  check.guarded("integral.eta1_closed_form", 1e-8, [&] {
    double worst = 0.0;
    for (double d : {0.5, -0.5, 2.0, -2.0}) {
      auto alg = make_block_algebra({{1, 1.0}});
      Matrix m(1, 1);
      m << Complex(d, 0.0);
      auto r = eta1(Element::from_blocks(alg, {m}, true), quad);
      worst = std::max(worst,
                       std::abs(r.value - (d > 0 ? 1.0 : -1.0) * std::erfc(std::abs(d))));
    }
    return worst;
  });

  // -- gallery ---------------------------------------------------------------
  check.guarded("gallery.tan_wrap_flow_equals_weight", 1e-6, [&] {
    std::vector<double> pts(5), wts(5, 0.5);  // total weight 2.5
    for (int i = 0; i < 5; ++i) pts[i] = (i + 0.37) / 5.0;
    auto grid = make_grid_algebra(pts, wts);
    auto path = build_tan_wrap_loop(grid, 0.11);
    double margin = path.endpoint_start().margin;
    auto chi = NormalizingFunction::smooth_gap(std::min(0.2, 0.5 * margin));
    double w = sf_winding(path, chi, quad).value;
    double c = sf_crossing(path).value;
    auto step = FunctionSpec::nonnegative_indicator();
    double telescoped = (trace(func_calc(step, path.value(1.0, Side::kLeft))) -
                         trace(func_calc(step, path.value(0.0, Side::kRight))))
                            .real();
    return std::max({std::abs(w - 2.5), std::abs(c - 2.5), std::abs(telescoped)});
  });

  check.guarded("gallery.covering_gamma_trace_ratio", 1e-8, [&] {
    CoveringSpec spec;
    spec.base_length = 4;
    spec.deck_order = 3;
    spec.edge_weight = [](int j, double) { return 1.0 + 0.3 * std::cos(2.0 * kPi * j / 4.0); };
    spec.edge_weight_dt = [](int, double) { return 0.0; };
    spec.potential = [](int, double) { return 0.0; };
    spec.potential_dt = [](int, double) { return 0.0; };
    auto probe = build_covering_path(spec);
    auto eig = hermitian_eigendecomposition(probe.path_full.value(0.0));
    std::vector<double> vals(eig.eigenvalues[0].data(),
                             eig.eigenvalues[0].data() + eig.eigenvalues[0].size());
    std::sort(vals.begin(), vals.end());
    double lo = 0.5 * (vals[0] + vals[1]), hi = 0.5 * (vals[2] + vals[3]);
    spec.potential = [=](int, double t) { return -hi + (hi - lo) * t; };
    spec.potential_dt = [=](int, double) { return hi - lo; };
    auto model = build_covering_path(spec);
    double margin = std::min(model.path_full.endpoint_start().margin,
                             model.path_full.endpoint_end().margin);
    auto chi = NormalizingFunction::smooth_gap(0.5 * margin);
    double full = sf_winding(model.path_full, chi, quad).value;
    double gamma = sf_winding(model.path_gamma, chi, quad).value;
    return std::abs(gamma - full / 3.0);
  });

  check.guarded("gallery.gn_resolvent_vs_functional_calculus", 0.0, [&] {
    auto report = build_gn_family({1, 2, 4, 8});
    bool monotone = true;
    for (std::size_t i = 1; i < report.entries.size(); ++i)
      monotone = monotone &&
                 report.entries[i].resolvent_distance < report.entries[i - 1].resolvent_distance;
    bool separated = true;
    for (const auto& e : report.entries) separated = separated && e.fc_distance >= 0.5;
    return monotone && separated ? 0.0 : 1.0;
  });

  out << "selfcheck " << (check.failures == 0 ? "OK" : "FAILED") << " failures="
      << check.failures << "\n";
  return check.failures;
}

}  // namespace specflow
