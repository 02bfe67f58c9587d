// One PASS/FAIL line per acceptance criterion. Exact arithmetic throughout, so every
// comparison is exact equality of jets; the only tolerances are the wall-clock budgets.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>

#include "CLI11.hpp"

#include "fedosov/cli.hpp"
#include "fedosov/expr.hpp"
#include "fedosov/quantization.hpp"
#include "fedosov/sampling.hpp"

using namespace fedosov;
using sampling::Gen;

namespace {

constexpr double kBudgetMoyal = 30.0;
constexpr double kBudgetSecondOrder = 60.0;
constexpr double kBudgetAssociativity = 120.0;
constexpr double kBudgetKinetic = 120.0;
constexpr double kNoBudget = 0.0;

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double budget;
  std::function<Outcome()> run;
};

Outcome from_report(const cli::Report& r) {
  Outcome o;
  int passed = 0;
  for (const auto& c : r.checks) {
    if (c.passed) {
      ++passed;
    } else if (o.ok) {
      o.ok = false;
      o.detail = c.name + ": " + c.detail;
    }
  }
  if (r.checks.empty()) {
    o.ok = false;
    o.detail = "no checks ran";
  }
  if (o.ok) o.detail = std::to_string(passed) + " checks";
  return o;
}

/// Combines outcomes, keeping the first failure.
Outcome both(const Outcome& a, const Outcome& b) {
  if (!a.ok) return a;
  if (!b.ok) return b;
  return {true, a.detail + "; " + b.detail};
}

cli::SuiteConfig config(int order, int samples, std::uint64_t seed) {
  cli::SuiteConfig c;
  c.order = order;
  c.samples = samples;
  c.seed = seed;
  return c;
}

// ---- independent test-side tensors ----

/// Gamma^l_{jk} = omega^{li} Gamma_{ijk}
Tensor3 raise_gamma(const ChartGeometry& g) {
  const std::size_t d = g.dim();
  Tensor3 up = make_tensor3(g.chart, d, g.order);
  for (std::size_t l = 0; l < d; ++l) {
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t i = 0; i < d; ++i) up[l][j][k] += g.omega_inv[l][i] * g.gamma_low[i][j][k];
      }
    }
  }
  return up;
}

/// R_{ijkl} = omega_{im} (d_k G^m_{lj} - d_l G^m_{kj} + G^m_{ks} G^s_{lj} - G^m_{ls} G^s_{kj})
Tensor4 lowered_riemann(const ChartGeometry& g, const Tensor3& G) {
  const std::size_t d = g.dim();
  Tensor4 up = make_tensor4(g.chart, d, g.order - 1), low = make_tensor4(g.chart, d, g.order - 1);
  for (std::size_t m = 0; m < d; ++m) {
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t l = 0; l < d; ++l) {
          Jet s = partial(G[m][l][j], k) - partial(G[m][k][j], l);
          for (std::size_t t = 0; t < d; ++t) s += G[m][k][t] * G[t][l][j] - G[m][l][t] * G[t][k][j];
          up[m][j][k][l] = s;
        }
      }
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t l = 0; l < d; ++l) {
          for (std::size_t m = 0; m < d; ++m) low[i][j][k][l] += g.omega[i][m] * up[m][j][k][l];
        }
      }
    }
  }
  return low;
}

Monomial ys(std::initializer_list<std::size_t> idx) {
  Monomial m;
  for (std::size_t i : idx) m = m + Monomial::unit(i);
  return m;
}

std::uint16_t dx(std::size_t l) { return static_cast<std::uint16_t>(1u << l); }

/// A random Darboux geometry with nonvanishing curvature; flat draws are skipped.
GeometryPtr curved_darboux(Gen& gen, std::size_t n, int order) {
  for (;;) {
    GeometryPtr g = sampling::random_darboux(gen, n, order);
    for (const auto& a : curvature(*g).up) {
      for (const auto& b : a) {
        for (const auto& c : b) {
          for (const auto& e : c) {
            if (!e.is_zero()) return g;
          }
        }
      }
    }
  }
}

// ---- criteria ----

Outcome c1_moyal() { return from_report(cli::run_suite("moyal-flat", config(4, 50, 1))); }

/// hbar^1 and hbar^2 against -(i/2) omega(X_f, X_g) and c (nabla_j X_f)^b (nabla_b X_g)^j.
Outcome second_order(const Rational& c) {
  Gen gen(2);
  int pairs = 0;
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 1 + static_cast<std::size_t>(t % 2);
    GeometryPtr g = curved_darboux(gen, n, required_geometry_order(2));
    const FedosovState s = solve_r(g, 2);
    const std::size_t d = g->dim();
    const Tensor3 G = raise_gamma(*g);
    auto field = [&](const Jet& f) {
      std::vector<Jet> x(d, Jet(g->chart, f.valid_order() - 1));
      for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) x[a] += g->omega_inv[a][b] * partial(f, b);
      }
      return x;
    };
    auto nabla_field = [&](const std::vector<Jet>& x) {
      JetMatrix out(d, std::vector<Jet>(d));
      for (std::size_t b = 0; b < d; ++b) {
        for (std::size_t j = 0; j < d; ++j) {
          out[b][j] = partial(x[b], j);
          for (std::size_t k = 0; k < d; ++k) out[b][j] += G[b][j][k] * x[k];
        }
      }
      return out;
    };
    for (int p = 0; p < 3; ++p) {
      const Jet f = gen.jet(g->chart, g->order, 3), h = gen.jet(g->chart, g->order, 3);
      const StarSeries fh = star(f, h, s);
      const auto xf = field(f), xh = field(h);
      Jet w(g->chart, g->order);
      for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) w += g->omega[a][b] * xf[a] * xh[b];
      }
      const Jet h1 = w * Complex(Rational(0), Rational(-1, 2));
      const JetMatrix nf = nabla_field(xf), nh = nabla_field(xh);
      Jet contraction(g->chart, g->order);
      for (std::size_t b = 0; b < d; ++b) {
        for (std::size_t j = 0; j < d; ++j) contraction += nf[b][j] * nh[j][b];
      }
      ++pairs;
      const std::string where = "geometry " + std::to_string(t + 1) + " (n=" + std::to_string(n) + "), pair " +
                                std::to_string(p + 1);
      if (!agree(fh[0], f * h)) return {false, where + ": hbar^0 is not f g"};
      if (!agree(fh[1], h1)) return {false, where + ": hbar^1 mismatch"};
      if (!agree(fh[2], contraction * Complex(c))) {
        std::string detail = where + ": hbar^2 is not " + rational_str(c) + " of the contraction";
        if (!contraction.is_zero()) {
          const Monomial m = contraction.terms().front().first;
          const Complex ratio = fh[2].coeff(m) / contraction.coeff(m);
          detail += agree(fh[2], contraction * ratio) ? "; it is exactly " + ratio.str() + " of it" : "; not a multiple";
        }
        return {false, detail};
      }
    }
  }
  return {true, std::to_string(pairs) + " pairs on 10 geometries"};
}

Outcome c2_faithful() { return second_order(Rational(1, 4)); }

Outcome c2_supplementary() { return second_order(Rational(1, 8)); }

Outcome c3_r_terms() {
  Gen gen(3);
  int count = 0;
  for (int t = 0; t < 6; ++t) {
    const std::size_t n = 1 + static_cast<std::size_t>(t % 2);
    GeometryPtr g = curved_darboux(gen, n, required_geometry_order(2));
    const FedosovState s = solve_r(g, 2);
    const std::string where = "geometry " + std::to_string(t + 1) + " (n=" + std::to_string(n) + ")";
    if (!check_flatness(s).empty()) return {false, where + ": " + check_flatness(s).str()};
    const std::size_t d = g->dim();
    const Tensor3 G = raise_gamma(*g);
    const Tensor4 R = lowered_riemann(*g, G);
    WeylForm r3(g->algebra, s.degree_cap), r4(g->algebra, s.degree_cap);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = 0; k < d; ++k) {
          for (std::size_t l = 0; l < d; ++l) {
            r3.accumulate_scaled(WeylKey{0, ys({i, j, k}), dx(l)}, R[i][j][k][l], Complex(Rational(-1, 8)));
            for (std::size_t m = 0; m < d; ++m) {
              Jet dr = partial(R[i][j][k][l], m);
              for (std::size_t q = 0; q < d; ++q) {
                dr -= G[q][m][i] * R[q][j][k][l] + G[q][m][j] * R[i][q][k][l] + G[q][m][k] * R[i][j][q][l] +
                      G[q][m][l] * R[i][j][k][q];
              }
              r4.accumulate_scaled(WeylKey{0, ys({i, j, k, m}), dx(l)}, dr, Complex(Rational(-1, 40)));
            }
          }
        }
      }
    }
    if (!agree(project(s.r, GradedProjection::hbar_degree2(3)), r3)) return {false, where + ": r(3) mismatch"};
    if (!agree(project(s.r, GradedProjection::hbar_degree2(4)), r4)) return {false, where + ": r(4) mismatch"};
    if (r3.is_zero() || r4.is_zero()) return {false, where + ": degenerate sample with vanishing curvature terms"};
    ++count;
  }
  return {true, std::to_string(count) + " geometries, r(3) and r(4) matched"};
}

Outcome c4_associativity() {
  return both(from_report(cli::run_suite("associativity", config(3, 25, 4))),
              from_report(cli::run_suite("correspondence", config(1, 25, 4))));
}

Outcome c5_cotangent() {
  return both(from_report(cli::run_suite("cotangent-homogeneity", config(3, 5, 5))),
              from_report(cli::run_suite("kompi", config(3, 5, 5))));
}

/// Scalar curvature of a 2d metric from the Brioschi formula, R = 2K.
Jet brioschi_scalar(const JetMatrix& g) {
  const Jet &E = g[0][0], &F = g[0][1], &Gm = g[1][1];
  auto du = [](const Jet& j) { return partial(j, 0); };
  auto dv = [](const Jet& j) { return partial(j, 1); };
  const Complex half(Rational(1, 2));
  auto det3 = [](const std::array<std::array<Jet, 3>, 3>& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  const Jet zero(E.chart(), E.valid_order() - 2);
  std::array<std::array<Jet, 3>, 3> m1{{{dv(dv(E)) * Complex(Rational(-1, 2)) + du(dv(F)) - du(du(Gm)) * half,
                                         du(E) * half, du(F) - dv(E) * half},
                                        {dv(F) - du(Gm) * half, E, F},
                                        {dv(Gm) * half, F, Gm}}};
  std::array<std::array<Jet, 3>, 3> m2{{{zero, dv(E) * half, du(Gm) * half}, {dv(E) * half, E, F}, {du(Gm) * half, F, Gm}}};
  const Jet det = E * Gm - F * F;
  return (det3(m1) - det3(m2)) * invert(det * det) * Complex(2);
}

/// Laplace-Beltrami as g^{ab} (d_a d_b - G~^c_{ab} d_c) with Christoffels from the metric.
DiffOp christoffel_laplacian(const JetMatrix& g, const ChartPtr& chart) {
  const Jet det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
  const Jet di = invert(det);
  const JetMatrix inv{{g[1][1] * di, -g[0][1] * di}, {-g[1][0] * di, g[0][0] * di}};
  DiffOp out(chart);
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      out.add(Monomial::unit(a) + Monomial::unit(b), 0, inv[a][b]);
      for (std::size_t c = 0; c < 2; ++c) {
        Jet gamma(chart, g[0][0].valid_order() - 1);
        for (std::size_t e = 0; e < 2; ++e) {
          gamma += inv[c][e] * (partial(g[e][a], b) + partial(g[e][b], a) - partial(g[a][b], e)) * Complex(Rational(1, 2));
        }
        out.add(Monomial::unit(c), 0, -(inv[a][b] * gamma));
      }
    }
  }
  return out;
}

GeometryPtr round_sphere(int order) {
  auto base = make_chart({"q1", "q2"}, {Complex(Rational(1, 2)), Complex(Rational(1, 3))});
  Jet conf = expr::elaborate("4/(1+q1^2+q2^2)^2", base, order + 2);
  const Jet zero(base, order + 2);
  return lift_cotangent({{conf, zero}, {zero, conf}});
}

Outcome c6_kinetic() {
  const int N = 2, order = required_geometry_order(N);
  Gen gen(6);
  std::vector<std::pair<std::string, GeometryPtr>> geoms{{"round sphere", round_sphere(order)}};
  while (geoms.size() < 4) {
    // a constant draw has R = 0 and leaves alpha undetermined
    JetMatrix metric = sampling::random_metric(gen, 2, order + 2);
    if (brioschi_scalar(metric).is_zero()) continue;
    geoms.emplace_back("random metric " + std::to_string(geoms.size()), lift_cotangent(metric));
  }
  std::string detail;
  for (const auto& [name, g] : geoms) {
    const KineticResult k = kinetic_alpha(solve_r(g, N));
    const ChartPtr chart = k.rho.chart();
    // rho + hbar^2 Delta must be hbar^2 times a multiplication operator m, with m = alpha R
    DiffOp rest = k.rho + christoffel_laplacian(g->metric, chart).shift_hbar(2);
    const Jet R = brioschi_scalar(g->metric);
    const Jet m = rest.coeff(Monomial(), 2, R.valid_order());
    rest -= DiffOp::multiplication(m).shift_hbar(2);
    for (const auto& [alpha, cs] : rest.terms()) {
      for (const auto& c : cs) {
        if (!agree(c, Jet(chart, c.valid_order()))) return {false, name + ": residual is not a multiplication operator"};
      }
    }
    if (R.is_zero()) return {false, name + ": scalar curvature vanishes"};
    const Monomial lead = R.terms().front().first;
    const Complex alpha = m.coeff(lead) / R.coeff(lead);
    if (!agree(m, R * alpha)) return {false, name + ": residual is not a constant multiple of R"};
    if (!k.alpha || Complex(*k.alpha) != alpha) return {false, name + ": engine alpha differs from the oracle"};
    if (alpha != Complex(Rational(1, 4))) return {false, name + ": alpha = " + alpha.str()};
    detail += (detail.empty() ? "" : ", ") + name + " alpha = " + alpha.str();
  }
  return {true, detail};
}

Outcome c7_kaehler() { return from_report(cli::run_suite("kaehler-orders", config(3, 5, 7))); }

Outcome c8_reps() { return from_report(cli::run_suite("flat-reps", config(3, 10, 8))); }

Outcome c9_structure() {
  Gen gen(9);
  const int cap = 6;
  int forms = 0, geometries = 0;
  for (int t = 0; t < 4; ++t) {
    GeometryPtr g = sampling::random_darboux(gen, 1 + static_cast<std::size_t>(t % 2), 6);
    for (int s = 0; s < 5; ++s) {
      const WeylForm a = gen.weyl(g->algebra, cap, 10, 2, 4);
      if (!op_delta(op_delta(a)).is_zero()) return {false, "delta^2 != 0"};
      if (!op_delta_star(op_delta_star(a)).is_zero()) return {false, "(delta*)^2 != 0"};
      WeylForm a00(g->algebra, cap);
      for (const auto& [k, c] : a.terms()) {
        if (k.sym_degree() == 0 && k.form == 0) a00.accumulate(k, c);
      }
      if (!agree(op_delta(op_delta_inv(a)) + op_delta_inv(op_delta(a)) + a00, a.with_cap(cap - 1))) {
        return {false, "decomposition identity"};
      }
      for (const auto& [k, c] : a.terms()) {
        // headroom above the cap for the degree raised by delta*
        const WeylForm m = WeylForm::term(g->algebra, cap + 2, k, c);
        const long lp = static_cast<long>(k.sym_degree()) + k.form_degree();
        if (!agree(op_delta(op_delta_star(m)) + op_delta_star(op_delta(m)), m * Complex(lp))) {
          return {false, "delta delta* + delta* delta != (l+p) id"};
        }
      }
      ++forms;
    }
  }
  const int cap_n = 5;
  for (int t = 0; t < 2; ++t) {
    const std::size_t n = 1 + static_cast<std::size_t>(t);
    std::vector<GeometryPtr> geoms{build_flat(n, 6), sampling::random_darboux(gen, n, 6),
                                   lift_cotangent(sampling::random_metric(gen, n, 8)),
                                   build_kaehler(sampling::random_kaehler_potential(gen, n, 9))};
    for (const auto& g : geoms) {
      const ValidationReport v = validate_connection(*g);
      for (const auto& e : v.entries) {
        if (!e.informational && !e.passed) return {false, std::string(kind_name(g->kind)) + ": " + e.name + " " + e.detail};
      }
      if (n == 2 && g->kind == GeometryKind::Kaehler) continue;
      const WeylForm rhat = curvature_form(*g, curvature(*g), cap_n);
      for (int s = 0; s < 2; ++s) {
        const WeylForm a = gen.weyl(g->algebra, cap_n, 5, 2, g->order);
        if (!agree(nabla(nabla(a, *g), *g), divide_hbar(graded_commutator(rhat, a)) * Complex::i())) {
          return {false, std::string(kind_name(g->kind)) + ": nabla^2 != (i/hbar)[R^, .]"};
        }
      }
      ++geometries;
    }
  }
  return {true, std::to_string(forms) + " random forms, " + std::to_string(geometries) + " geometries for nabla^2, 8 validated"};
}

std::vector<Criterion> criteria() {
  return {
      {1, "flat star == Moyal through hbar^4, 50 pairs", kBudgetMoyal, c1_moyal},
      {2, "hbar^1 = -(i/2) omega(X_f,X_g), hbar^2 = 1/4 (nabla X_f)(nabla X_g)", kBudgetSecondOrder, c2_faithful},
      {2, "supplementary: hbar^2 = 1/8 (nabla X_f)(nabla X_g)", kBudgetSecondOrder, c2_supplementary},
      {3, "r(3) = -1/8 R y^3 dx and r(4) = -1/40 nabla R y^4 dx", kNoBudget, c3_r_terms},
      {4, "associativity through hbar^3 and correspondence, 25 per kind", kBudgetAssociativity, c4_associativity},
      {5, "cotangent homogeneity and polarization compatibility through hbar^3", kNoBudget, c5_cotangent},
      {6, "kinetic energy alpha = 1/4 with oracle Delta and R", kBudgetKinetic, c6_kinetic},
      {7, "Kaehler hbar^2, hbar^3 orders and holomorphic pairs", kNoBudget, c7_kaehler},
      {8, "sigma and rho homomorphisms, rho_extend factorization independence", kNoBudget, c8_reps},
      {9, "delta identities, decomposition, nabla^2, validation identities", kNoBudget, c9_structure},
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  app.add_option("--only", only, "run only these criteria");
  CLI11_PARSE(app, argc, argv);

  bool all = true;
  for (const auto& c : criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char timing[64];
    if (c.budget > 0) {
      std::snprintf(timing, sizeof timing, "%.1f s of %.0f s", secs, c.budget);
      if (secs > c.budget) {
        o.ok = false;
        o.detail += "; over the time budget";
      }
    } else {
      std::snprintf(timing, sizeof timing, "%.1f s", secs);
    }
    all = all && o.ok;
    std::cout << "C" << c.id << " " << (o.ok ? "PASS" : "FAIL") << "  " << c.title << "  [" << timing << "]  " << o.detail
              << std::endl;
  }
  return all ? 0 : 1;
}
