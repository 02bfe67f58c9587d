#include "doctest.h"
#include "fedosov/error.hpp"
#include "fedosov/expr.hpp"
#include "fedosov/quantization.hpp"
#include "support.hpp"

using namespace fedosov;
using fedosov::testing::Gen;

namespace {

GeometryPtr sphere(int metric_order) {
  auto base = make_chart({"q1", "q2"}, {Complex(Rational(1, 2)), Complex(Rational(1, 3))});
  Jet conf = expr::elaborate("4/(1+q1^2+q2^2)^2", base, metric_order);
  return lift_cotangent({{conf, Jet(base, metric_order)}, {Jet(base, metric_order), conf}});
}

}  // namespace

TEST_CASE("geometric quantization on cotangent charts") {
  auto g = sphere(9);
  const ChartPtr config = configuration_chart(*g);
  const Complex mi(Rational(0), Rational(-1));
  // q^a -> multiplication
  Jet q1 = Jet::variable(g->chart, 9, 0);
  DiffOp rq = gq_cotangent(q1, *g);
  CHECK(agree(rq, DiffOp::multiplication(Jet::variable(config, 9, 0))));
  // p_a -> -i hbar (d_a + 1/4 g^{bc} d_a g_{bc})
  const JetMatrix ginv = invert_matrix(g->metric);
  for (std::size_t a = 0; a < 2; ++a) {
    DiffOp rp = gq_cotangent(Jet::variable(g->chart, 9, 2 + a), *g);
    Jet corr(config, 8);
    for (std::size_t b = 0; b < 2; ++b) {
      for (std::size_t c = 0; c < 2; ++c) corr += ginv[b][c] * partial(g->metric[b][c], a);
    }
    DiffOp want = (DiffOp::derivative(config, a, 9) + DiffOp::multiplication(corr * Complex(Rational(1, 4)))).shift_hbar(1) * mi;
    CHECK(agree(rp, want));
  }
  CHECK_THROWS_AS(gq_cotangent(Jet::variable(g->chart, 9, 2) * Jet::variable(g->chart, 9, 3), *g), StructureError);
  // flat: constant a^i p_i -> -i hbar a^i d_i
  auto flat = build_flat(2, 7);
  Jet f = expr::elaborate("3*p1 - p2/2", flat->chart, 7);
  auto fc = configuration_chart(*flat);
  DiffOp want = (DiffOp::derivative(fc, 0, 7) * Complex(3) + DiffOp::derivative(fc, 1, 7) * Complex(Rational(-1, 2))).shift_hbar(1) * mi;
  CHECK(agree(gq_cotangent(f, *flat), want));
}

TEST_CASE("geometric quantization on Kaehler charts") {
  Gen gen(37);
  auto g = build_kaehler(testing::random_kaehler_potential(gen, 1, 9));
  const ChartPtr config = configuration_chart(*g);
  const Jet& K = *g->potential;
  CHECK(agree(gq_kaehler(Jet::variable(g->chart, 6, 0), *g), DiffOp::multiplication(Jet::variable(config, 6, 0))));
  CHECK(agree(gq_kaehler(partial(K, 0), *g), DiffOp::derivative(config, 0, 6).shift_hbar(1)));
  // u(z) d_z K + v(z) -> hbar (u d_z + u'/2) + v
  Jet z = Jet::variable(g->chart, 9, 0);
  Jet u = z * z + Jet::constant(g->chart, 9, Complex(2)), v = z * Complex(3);
  Jet uc = restrict_to(u, config, {0}), vc = restrict_to(v, config, {0});
  DiffOp want = DiffOp::multiplication(vc) +
                (diffop_compose(DiffOp::multiplication(uc), DiffOp::derivative(config, 0, 9)) +
                 DiffOp::multiplication(partial(uc, 0) * Complex(Rational(1, 2))))
                    .shift_hbar(1);
  CHECK(agree(gq_kaehler(u * partial(K, 0) + v, *g), want));
  CHECK_THROWS_AS(gq_kaehler(partial(K, 0) * partial(K, 0), *g), StructureError);
  // flat K = z zb: zb = d_z K -> hbar d_z
  auto chart = make_chart({"z", "zb"}, {Complex(0), Complex(0)}, {1, 0});
  auto fk = build_kaehler(expr::elaborate("z*zb", chart, 9));
  CHECK(agree(gq_kaehler(Jet::variable(fk->chart, 6, 1), *fk), DiffOp::derivative(configuration_chart(*fk), 0, 6).shift_hbar(1)));
}

TEST_CASE("rho_extend on flat charts") {
  auto s = solve_r(build_flat(1, 9), 3);
  const auto& g = *s.geometry;
  auto config = configuration_chart(g);
  const Complex mi(Rational(0), Rational(-1));
  // p^2 -> -hbar^2 d^2
  Jet p = Jet::variable(g.chart, 9, 1), q = Jet::variable(g.chart, 9, 0);
  DiffOp d = DiffOp::derivative(config, 0, 9);
  CHECK(agree(rho_extend_checked(p * p, s).op, diffop_compose(d, d).shift_hbar(2) * Complex(-1)));
  // q p -> (q~ p~ + p~ q~)/2
  DiffOp qt = DiffOp::multiplication(Jet::variable(config, 9, 0)), pt = d.shift_hbar(1) * mi;
  CHECK(agree(rho_extend_checked(q * p, s).op, (diffop_compose(qt, pt) + diffop_compose(pt, qt)) * Complex(Rational(1, 2))));
  // affine observables agree with gq_cotangent
  Jet aff = q * q * p + q;
  CHECK(agree(rho_extend(aff, s), gq_cotangent(aff, g)));
  KineticResult k = kinetic_alpha(s);
  CHECK(k.pure_multiplication);
  CHECK_FALSE(k.alpha.has_value());
}

TEST_CASE("rho_extend is a homomorphism on curved cotangent charts") {
  Gen gen(41);
  auto g = lift_cotangent(testing::random_metric(gen, 1, 11));
  auto s = solve_r(g, 3);
  auto qj = [&] { return lift_to_phase_space(gen.jet(configuration_chart(*g), 9, 2), *g); };
  for (int t = 0; t < 2; ++t) {
    Jet p = Jet::variable(g->chart, 9, 1);
    Jet f = qj() * p + qj();
    Jet h = qj() * p * p + qj() * p;
    RhoResult rf = rho_extend_checked(f, s), rh = rho_extend_checked(h, s);
    CHECK(rf.consistent);
    CHECK(rh.consistent);
    StarSeries fh = star(f, h, s), hf = star(h, f, s);
    DiffOp rhs(configuration_chart(*g));
    for (int k = 0; k <= 3; ++k) rhs += rho_extend(fh[k] - hf[k], s).shift_hbar(k);
    CHECK(agree(diffop_commutator(rf.op, rh.op).truncated_hbar(3), rhs.truncated_hbar(3)));
  }
}

TEST_CASE("kinetic energy on the round sphere") {
  auto s = solve_r(sphere(9), 2);
  KineticResult k = kinetic_alpha(s);
  INFO(k.detail);
  CHECK(k.pure_multiplication);
  REQUIRE(k.alpha.has_value());
  CHECK(*k.alpha == Rational(1, 4));
  // unit sphere: R = 2
  CHECK(scalar_curvature(s.geometry->metric).constant_term() == Complex(2));
}

TEST_CASE("compatibility with the vertical polarization") {
  Gen gen(43);
  auto s = solve_r(lift_cotangent(testing::random_metric(gen, 2, 9)), 2);
  CompatReport k = check_kompi(s, 2, 5);
  INFO(k.str());
  CHECK(k.ok());
  CompatReport h = check_homogeneity(s, 2, 5);
  INFO(h.str());
  CHECK(h.ok());
}

TEST_CASE("a non-lifted connection breaks compatibility") {
  Gen gen(47);
  auto g = lift_cotangent(testing::random_metric(gen, 1, 9));
  Tensor3 low = g->gamma_low;
  // constant perturbation of Gamma_{pbar pbar pbar}
  low[1][1][1] += Jet::constant(g->chart, g->order, Complex(1));
  auto bad = with_gamma_low(g, low);
  auto s = solve_r(bad, 2);
  CompatReport k = check_kompi(s, 2, 5);
  INFO(k.str());
  CHECK_FALSE(k.ok());
}

TEST_CASE("Kaehler orders") {
  Gen gen(53);
  auto s = solve_r(build_kaehler(testing::random_kaehler_potential(gen, 1, 12)), 3);
  CompatReport r = check_kaehler_orders(s, 1, 7);
  MESSAGE(r.str());
  CHECK(r.ok());
  auto chart = make_chart({"z", "zb"}, {Complex(0), Complex(0)}, {1, 0});
  auto flat = solve_r(build_kaehler(expr::elaborate("z*zb", chart, 12)), 3);
  CompatReport f = check_kaehler_orders(flat, 1, 7);
  CHECK(f.ok());
}

TEST_CASE("flat representations") {
  CompatReport r = flat_reps(1, 3);
  INFO(r.str());
  CHECK(r.ok());
  CHECK(r.checks.size() == 4);
}
