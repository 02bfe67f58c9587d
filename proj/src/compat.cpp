#include <algorithm>
#include <random>
#include <sstream>

#include "fedosov/error.hpp"
#include "fedosov/quantization.hpp"

namespace fedosov {

namespace {

bool vanishes(const Jet& j) { return agree(j, Jet(j.chart(), j.valid_order())); }

std::string monomial_str(Monomial m, const Chart& chart) {
  std::string s;
  for (std::size_t v = 0; v < chart.dim(); ++v) {
    if (m[v] == 0) continue;
    if (!s.empty()) s += "*";
    s += "(" + chart.name(v) + "-x0)";
    if (m[v] > 1) s += "^" + std::to_string(m[v]);
  }
  return s.empty() ? "1" : s;
}

/// Location of the first coefficient where a and b differ, or empty.
std::string first_difference(const Jet& a, const Jet& b) {
  const Jet d = a - b;
  for (const auto& [m, c] : d.terms()) {
    if (static_cast<int>(m.degree()) <= d.valid_order()) {
      return "coefficient of " + monomial_str(m, *d.chart()) + " off by " + c.str();
    }
  }
  return {};
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  Rational rational() {
    Rational r(integer(-3, 3), integer(1, 2));
    r.canonicalize();
    return r;
  }
  Complex complex() { return integer(0, 1) ? Complex(rational()) : Complex(rational(), rational()); }

  /// Random polynomial in the variables `vars`, degree <= max_degree, about the chart base point.
  Jet polynomial(const ChartPtr& chart, int order, const std::vector<std::size_t>& vars, int max_degree, bool real = false) {
    std::vector<Jet::Term> terms;
    std::vector<unsigned> e(vars.size(), 0);
    while (true) {
      unsigned d = 0;
      for (unsigned x : e) d += x;
      if (static_cast<int>(d) <= max_degree && integer(0, 2) == 0) {
        Monomial m;
        for (std::size_t i = 0; i < vars.size(); ++i) m = m.with(vars[i], e[i]);
        terms.emplace_back(m, real ? Complex(rational()) : complex());
      }
      std::size_t i = 0;
      while (i < e.size() && e[i] == static_cast<unsigned>(max_degree)) e[i++] = 0;
      if (i == e.size()) break;
      ++e[i];
    }
    return Jet::from_terms(chart, order, std::move(terms));
  }

 private:
  std::mt19937_64 rng_;
};

/// Verdict accumulator: remembers the first failure.
struct Verdict {
  CompatCheck check;
  Verdict(std::string name, int orders) {
    check.name = std::move(name);
    check.orders = orders;
  }
  void expect_equal(const Jet& got, const Jet& want, const std::string& where) {
    if (!check.passed) return;
    if (agree(got, want)) return;
    check.passed = false;
    check.location = where + ": " + first_difference(got, want);
  }
  void fail(const std::string& where) {
    if (!check.passed) return;
    check.passed = false;
    check.location = where;
  }
};

std::string sample_at(int s, int k) { return "sample " + std::to_string(s) + ", hbar^" + std::to_string(k); }

const ChartGeometry& require_geometry(const FedosovState& state) {
  if (!state.geometry || !state.converged) throw StateError("Fedosov state has not converged");
  return *state.geometry;
}

int sample_order(const FedosovState& state) { return std::max(state.geometry->order, required_geometry_order(state.target_order)); }

}  // namespace

bool CompatReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const CompatCheck& c) { return c.passed || c.informational; });
}

void CompatReport::add(CompatCheck c) { checks.push_back(std::move(c)); }

std::string CompatReport::str() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.passed ? "PASS " : (c.informational ? "INFO " : "FAIL ")) << c.name << " (hbar^0..hbar^" << c.orders << ")";
    if (!c.location.empty()) os << " -- " << c.location;
    os << "\n";
  }
  for (const auto& n : notes) os << "  " << n << "\n";
  return os.str();
}

CompatReport check_kompi(const FedosovState& state, int samples, std::uint64_t seed) {
  const ChartGeometry& g = require_geometry(state);
  if (g.kind != GeometryKind::Cotangent && g.kind != GeometryKind::Flat) {
    throw StructureError("check_kompi needs a cotangent or flat geometry");
  }
  const int N = state.target_order;
  const int order = sample_order(state);
  const auto q = g.first_block(), p = g.second_block();
  Sampler rng(seed);
  Verdict polarized("f*g = fg for p-independent f, g", N);
  Verdict left("f*h = fh + (i hbar/2){f,h} for h affine in p", N);
  Verdict right("h*f = hf + (i hbar/2){h,f} for h affine in p", N);
  const Complex half_i(Rational(0), Rational(1, 2));
  for (int s = 0; s < samples; ++s) {
    Jet f = rng.polynomial(g.chart, order, q, 3), k = rng.polynomial(g.chart, order, q, 3);
    Jet h = rng.polynomial(g.chart, order, q, 2);
    for (std::size_t i = 0; i < g.n; ++i) h += rng.polynomial(g.chart, order, q, 2) * Jet::variable(g.chart, order, p[i]);
    StarSeries fk = star(f, k, state), fh = star(f, h, state), hf = star(h, f, state);
    for (int j = 0; j <= N; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      const Jet zero(g.chart, order);
      polarized.expect_equal(fk[uj], j == 0 ? f * k : zero, sample_at(s, j));
      left.expect_equal(fh[uj], j == 0 ? f * h : (j == 1 ? poisson(f, h, g) * half_i : zero), sample_at(s, j));
      right.expect_equal(hf[uj], j == 0 ? h * f : (j == 1 ? poisson(h, f, g) * half_i : zero), sample_at(s, j));
    }
  }
  CompatReport rep;
  rep.add(polarized.check);
  rep.add(left.check);
  rep.add(right.check);
  return rep;
}

CompatReport check_homogeneity(const FedosovState& state, int samples, std::uint64_t seed) {
  const ChartGeometry& g = require_geometry(state);
  if (g.kind != GeometryKind::Cotangent && g.kind != GeometryKind::Flat) {
    throw StructureError("check_homogeneity needs a cotangent or flat geometry");
  }
  const int N = state.target_order;
  const int order = sample_order(state);
  const auto q = g.first_block(), p = g.second_block();
  Sampler rng(seed);
  auto H = [&](const StarSeries& s, std::size_t k) {
    return euler(s[k], p) + s[k] * Complex(static_cast<long>(k));
  };
  Verdict derivation("H(f*g) = (Hf)*g + f*(Hg), H = p d/dp + hbar d/dhbar", N);
  Verdict monomials("p-monomials of degrees k, l give H-degree k + l", N);
  for (int s = 0; s < samples; ++s) {
    // polynomials in p of degree <= 2 with polynomial coefficients in q
    Jet f(g.chart, order), h(g.chart, order);
    for (int t = 0; t < 2; ++t) {
      Monomial m;
      for (std::size_t i = 0; i < g.n; ++i) m = m.with(p[i], static_cast<unsigned>(rng.integer(0, 1)));
      f += rng.polynomial(g.chart, order, q, 2) * Jet::monomial(g.chart, order, m);
      Monomial m2;
      for (std::size_t i = 0; i < g.n; ++i) m2 = m2.with(p[i], static_cast<unsigned>(rng.integer(0, 1)));
      h += rng.polynomial(g.chart, order, q, 2) * Jet::monomial(g.chart, order, m2);
    }
    StarSeries fh = star(f, h, state);
    StarSeries a = star(euler(f, p), h, state), b = star(f, euler(h, p), state);
    for (int k = 0; k <= N; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      derivation.expect_equal(H(fh, uk), a[uk] + b[uk], sample_at(s, k));
    }
    // homogeneous monomials: c1(q) p^alpha, c2(q) p^beta
    const std::size_t i = static_cast<std::size_t>(rng.integer(0, static_cast<int>(g.n) - 1));
    const unsigned kdeg = static_cast<unsigned>(rng.integer(0, 1)), ldeg = static_cast<unsigned>(rng.integer(0, 1));
    Jet u = rng.polynomial(g.chart, order, q, 2) * Jet::monomial(g.chart, order, Monomial::unit(p[i], kdeg));
    Jet v = rng.polynomial(g.chart, order, q, 2) * Jet::monomial(g.chart, order, Monomial::unit(p[g.n - 1 - i], ldeg));
    StarSeries uv = star(u, v, state);
    for (int k = 0; k <= N; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      if (vanishes(uv[uk])) continue;
      const int want = static_cast<int>(kdeg + ldeg) - k;
      if (want < 0 || !agree(euler(uv[uk], p), uv[uk] * Complex(want))) {
        monomials.fail(sample_at(s, k) + ": coefficient is not homogeneous of p-degree " + std::to_string(want));
      }
    }
  }
  CompatReport rep;
  rep.add(derivation.check);
  rep.add(monomials.check);
  return rep;
}

CompatReport check_kaehler_orders(const FedosovState& state, int samples, std::uint64_t seed) {
  const ChartGeometry& g = require_geometry(state);
  if (g.kind != GeometryKind::Kaehler || !g.potential) throw StructureError("check_kaehler_orders needs a Kaehler geometry");
  if (state.target_order < 3) throw StateError("check_kaehler_orders needs a Fedosov state through hbar^3");
  const std::size_t n = g.n;
  const int N = state.target_order;
  const int order = sample_order(state);
  const auto z = g.first_block();
  const Jet& K = *g.potential;
  const CurvatureData curv = curvature(g);
  const JetMatrix& Ainv = g.kaehler_a_inv;
  Sampler rng(seed);
  const Complex half_i(Rational(0), Rational(1, 2)), minus_i(Rational(0), Rational(-1));

  Verdict h2("(w_a z^a) * (-i d_m K): hbar^2 coefficient vanishes", 2);
  Verdict h3("(w_a z^a) * (-i d_m K): hbar^3 coefficient vanishes", 3);
  Verdict h1("(w_a z^a) * (-i d_m K): hbar^1 = (i/2){f,h}", 1);
  Verdict c33("hbar^3 contribution pi(f_(3) o h_(3)) = -T/64", 3);
  Verdict c51("hbar^3 contribution pi(f_(5) o h_(1) + f_(1) o h_(5)) = +T/64", 3);
  Verdict holo("f*g = fg for holomorphic f, g", N);
  CompatReport rep;

  auto comp = [](const WeylForm& a, int d) { return project(a, GradedProjection::hbar_degree2(d)); };
  auto pair_h3 = [&](const WeylForm& fh, const WeylForm& hh, int a, int b) {
    HbarSeries s = symbol(project(weyl_mul(comp(fh, a), comp(hh, b)), GradedProjection::scalar()));
    return s.size() > 3 ? s[3] : Jet(g.chart, order);
  };

  for (int s = 0; s < samples; ++s) {
    std::vector<Complex> w(n);
    Jet f(g.chart, order);
    for (std::size_t a = 0; a < n; ++a) {
      w[a] = rng.complex();
      if (w[a].is_zero()) w[a] = Complex(1);
      f += Jet::variable(g.chart, order, z[a]) * w[a];
    }
    const WeylForm fh = flat_section(f, state);
    for (std::size_t m = 0; m < n; ++m) {
      const Jet h = partial(K, z[m]) * minus_i;
      const WeylForm hh = flat_section(h, state);
      const StarSeries fs = star_sections(fh, hh, state);
      const std::string where = "sample " + std::to_string(s) + ", m = " + std::to_string(m + 1);
      h1.expect_equal(fs[1], poisson(f, h, g) * half_i, where);
      h2.expect_equal(fs[2], Jet(g.chart, fs[2].valid_order()), where);
      h3.expect_equal(fs[3], Jet(g.chart, fs[3].valid_order()), where);

      // T = w_a R^a_{b c dbar} R_{m nbar k lbar} A^{dbar k} A^{nbar b} A^{lbar c}
      Jet T(g.chart, order);
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
          for (std::size_t c = 0; c < n; ++c) {
            for (std::size_t d = 0; d < n; ++d) {
              const Jet& r1 = curv.up[a][b][c][n + d];
              if (r1.is_zero()) continue;
              for (std::size_t nb = 0; nb < n; ++nb) {
                for (std::size_t k = 0; k < n; ++k) {
                  for (std::size_t l = 0; l < n; ++l) {
                    T += r1 * curv.low[m][n + nb][k][n + l] * Ainv[d][k] * Ainv[nb][b] * Ainv[l][c] * w[a];
                  }
                }
              }
            }
          }
        }
      }
      std::ostringstream pairs;
      pairs << where << ": hbar^3 contributions";
      Jet total(g.chart, order);
      for (int a = 0; a <= 6; ++a) {
        const Jet v = pair_h3(fh, hh, a, 6 - a);
        total += v;
        pairs << " (" << a << "," << 6 - a << ")=" << (vanishes(v) ? std::string("0") : v.constant_term().str());
      }
      pairs << "; T at base point = " << T.constant_term().str();
      rep.notes.push_back(pairs.str());
      c33.expect_equal(pair_h3(fh, hh, 3, 3), T * Complex(Rational(-1, 64)), where);
      c51.expect_equal(pair_h3(fh, hh, 5, 1) + pair_h3(fh, hh, 1, 5), T * Complex(Rational(1, 64)), where);
    }

    Jet p1 = rng.polynomial(g.chart, order, z, 3), p2 = rng.polynomial(g.chart, order, z, 3);
    StarSeries pp = star(p1, p2, state);
    for (int k = 0; k <= N; ++k) {
      holo.expect_equal(pp[static_cast<std::size_t>(k)], k == 0 ? p1 * p2 : Jet(g.chart, order), sample_at(s, k));
    }
  }
  rep.checks.insert(rep.checks.begin(), {h1.check, h2.check, h3.check, c33.check, c51.check, holo.check});
  return rep;
}

StarSeries moyal_general(const Jet& f, const Jet& g, const std::vector<std::vector<Complex>>& pi, int target_order) {
  if (!same_chart(f.chart(), g.chart())) throw ChartMismatch("moyal_general: charts differ");
  const std::size_t d = f.nvars();
  if (pi.size() != d) throw StructureError("moyal_general: Poisson tensor has the wrong size");
  struct Pair {
    Jet left, right;
    Complex c;
  };
  StarSeries out;
  out.valid_hbar_order = target_order;
  std::vector<Pair> level{{f, g, Complex(1)}};
  Complex factor(1);
  for (int k = 0; k <= target_order; ++k) {
    Jet sum(f.chart(), std::min(f.valid_order(), g.valid_order()) - k);
    for (const auto& p : level) sum.add_scaled(p.left * p.right, p.c);
    out.coefficients.push_back(sum * factor);
    if (k == target_order) break;
    std::vector<Pair> next;
    for (const auto& p : level) {
      for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) {
          if (pi[a][b].is_zero()) continue;
          next.push_back({partial(p.left, a), partial(p.right, b), p.c * pi[a][b]});
        }
      }
    }
    level = std::move(next);
    factor *= Complex(Rational(0), Rational(1, 2 * (k + 1)));
  }
  return out;
}

DiffOp weyl_ordered(const Jet& poly, const std::vector<DiffOp>& generators, const ChartPtr& target) {
  for (const auto& b : poly.chart()->base_point()) {
    if (!b.is_zero()) throw StructureError("weyl_ordered needs a polynomial about the origin");
  }
  if (generators.size() != poly.nvars()) throw StructureError("weyl_ordered: one generator per variable required");
  DiffOp out(target);
  for (const auto& [m, c] : poly.terms()) {
    std::vector<std::size_t> word;
    for (std::size_t v = 0; v < poly.nvars(); ++v) {
      for (unsigned e = 0; e < m[v]; ++e) word.push_back(v);
    }
    DiffOp sum(target);
    long count = 0;
    do {
      DiffOp prod = DiffOp::identity(target, 1 << 10);
      for (std::size_t v : word) prod = diffop_compose(prod, generators[v]);
      sum += prod;
      ++count;
    } while (std::next_permutation(word.begin(), word.end()));
    out += sum * (c * Complex(Rational(1, count)));
  }
  return out;
}

namespace {

/// Checks rep(f*g) = rep(f) rep(g) over all pairs of monomials of degree <= max_degree.
void check_representation(Verdict& v, const ChartPtr& phase, const std::vector<std::vector<Complex>>& pi,
                          const std::vector<DiffOp>& gens, const ChartPtr& config, int max_degree, int N) {
  const int order = 1 << 10;
  std::vector<Jet> monos;
  const std::size_t d = phase->dim();
  std::vector<unsigned> e(d, 0);
  while (true) {
    unsigned deg = 0;
    for (unsigned x : e) deg += x;
    if (static_cast<int>(deg) <= max_degree) {
      Monomial m;
      for (std::size_t i = 0; i < d; ++i) m = m.with(i, e[i]);
      monos.push_back(Jet::monomial(phase, order, m));
    }
    std::size_t i = 0;
    while (i < d && e[i] == static_cast<unsigned>(max_degree)) e[i++] = 0;
    if (i == d) break;
    ++e[i];
  }
  for (std::size_t a = 0; a < monos.size(); ++a) {
    const DiffOp ra = weyl_ordered(monos[a], gens, config);
    for (std::size_t b = 0; b < monos.size(); ++b) {
      const StarSeries s = moyal_general(monos[a], monos[b], pi, N);
      DiffOp lhs(config);
      for (int k = 0; k <= N; ++k) lhs += weyl_ordered(s[static_cast<std::size_t>(k)], gens, config).shift_hbar(k);
      const DiffOp rhs = diffop_compose(ra, weyl_ordered(monos[b], gens, config)).truncated_hbar(N);
      if (!agree(lhs.truncated_hbar(N), rhs)) {
        v.fail(monos[a].str() + " * " + monos[b].str() + ":\n" + (lhs - rhs).str());
        return;
      }
    }
  }
}

}  // namespace

CompatReport flat_reps(std::size_t n, int target_order) {
  const int order = 1 << 10;
  CompatReport rep;
  const int max_degree = n == 1 ? 3 : 2;
  const Complex mi(Rational(0), Rational(-1));

  // Schroedinger: sigma(q^i) = q^i, sigma(p_i) = -i hbar d_i, omega^{q p} = 1
  {
    auto names = coordinate_names(GeometryKind::Flat, n);
    auto phase = make_chart(names, std::vector<Complex>(2 * n, Complex(0)));
    auto config = make_chart(std::vector<std::string>(names.begin(), names.begin() + static_cast<long>(n)),
                             std::vector<Complex>(n, Complex(0)));
    std::vector<std::vector<Complex>> pi(2 * n, std::vector<Complex>(2 * n, Complex(0)));
    std::vector<DiffOp> gens;
    for (std::size_t i = 0; i < n; ++i) {
      pi[i][n + i] = Complex(1);
      pi[n + i][i] = Complex(-1);
      gens.push_back(DiffOp::multiplication(Jet::variable(config, order, i)));
    }
    for (std::size_t i = 0; i < n; ++i) gens.push_back(DiffOp::derivative(config, i, order).shift_hbar(1) * mi);

    Verdict example("Schroedinger: sigma(p_i) q^k = -i hbar k q^(k-1)", 1);
    for (unsigned k = 1; k <= 3; ++k) {
      const Jet qk = Jet::monomial(config, order, Monomial::unit(0, k));
      HbarSeries out = diffop_apply(gens[n], qk);
      const Jet want = Jet::monomial(config, order, Monomial::unit(0, k - 1), Complex(Rational(0), Rational(-static_cast<long>(k))));
      example.expect_equal(out.size() > 1 ? out[1] : Jet(config, order), want, "k = " + std::to_string(k));
      if (!vanishes(out[0])) example.fail("k = " + std::to_string(k) + ": unexpected hbar^0 part");
    }
    rep.add(example.check);
    Verdict hom("Schroedinger: sigma(f*g) = sigma(f) sigma(g) on monomials", target_order);
    check_representation(hom, phase, pi, gens, config, max_degree, target_order);
    rep.add(hom.check);
  }

  // Fock on K = sum z zb: omega^{z zb} = i, rho(z) = z, rho(zb) = hbar d_z
  {
    auto names = coordinate_names(GeometryKind::Kaehler, n);
    std::vector<int> partner(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      partner[i] = static_cast<int>(n + i);
      partner[n + i] = static_cast<int>(i);
    }
    auto phase = make_chart(names, std::vector<Complex>(2 * n, Complex(0)), partner);
    auto config = make_chart(std::vector<std::string>(names.begin(), names.begin() + static_cast<long>(n)),
                             std::vector<Complex>(n, Complex(0)));
    std::vector<std::vector<Complex>> pi(2 * n, std::vector<Complex>(2 * n, Complex(0)));
    std::vector<DiffOp> gens;
    for (std::size_t i = 0; i < n; ++i) {
      pi[i][n + i] = Complex(Rational(0), Rational(1));
      pi[n + i][i] = Complex(Rational(0), Rational(-1));
      gens.push_back(DiffOp::multiplication(Jet::variable(config, order, i)));
    }
    for (std::size_t i = 0; i < n; ++i) gens.push_back(DiffOp::derivative(config, i, order).shift_hbar(1));

    // normalization fixed by omega^{z zb}: [rho(z), rho(zb)] = rho(z*zb - zb*z) = i hbar omega^{z zb}
    Verdict norm("Fock: [rho(z), rho(zb)] = i hbar omega^{z zb}", 1);
    const DiffOp comm = diffop_commutator(gens[0], gens[n]);
    const DiffOp want = DiffOp::identity(config, order).shift_hbar(1) * (Complex(Rational(0), Rational(1)) * pi[0][n]);
    if (!agree(comm, want)) norm.fail("commutator:\n" + comm.str());
    rep.add(norm.check);
    Verdict hom("Fock: rho(f*g) = rho(f) rho(g) on monomials", target_order);
    check_representation(hom, phase, pi, gens, config, max_degree, target_order);
    rep.add(hom.check);
  }
  return rep;
}

}  // namespace fedosov
