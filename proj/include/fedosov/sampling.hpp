#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "fedosov/geometry.hpp"
#include "fedosov/jet.hpp"
#include "fedosov/weyl.hpp"

namespace fedosov::sampling {

/// Seeded source of small exact values for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  Rational rational(int range = 3) {
    int num = integer(-range, range);
    int den = integer(1, 3);
    Rational r(num, den);
    r.canonicalize();
    return r;
  }
  Complex complex(int range = 3, bool real = false) {
    if (real || coin(0.6)) return Complex(rational(range));
    return Complex(rational(range), rational(range));
  }

  /// Sparse jet with terms of total degree <= max_degree.
  Jet jet(const ChartPtr& chart, int order, int max_degree, double density = 0.3, bool real = false) {
    std::vector<Jet::Term> terms;
    enumerate(chart->dim(), std::min(order, max_degree), [&](Monomial m) {
      if (coin(density)) terms.emplace_back(m, complex(3, real));
    });
    return Jet::from_terms(chart, order, std::move(terms));
  }

  /// Jet with nonzero constant term.
  Jet unit_jet(const ChartPtr& chart, int order, int max_degree) {
    Jet j = jet(chart, order, max_degree);
    Rational c = j.constant_term().re();
    if (c == 0) c = 1;
    std::vector<Jet::Term> terms{{Monomial(), Complex(c)}};
    return j - Jet::constant(chart, order, j.constant_term()) + Jet::from_terms(chart, order, terms);
  }

  /// Random element of Omega(W) with coefficients of total degree <= coeff_degree.
  WeylForm weyl(const WeylAlgebraPtr& alg, int cap2, int nterms, int coeff_degree, int order) {
    WeylForm w(alg, cap2);
    const int n = static_cast<int>(alg->dim());
    for (int t = 0; t < nterms; ++t) {
      WeylKey key;
      const int d2 = integer(0, cap2);
      key.hbar = static_cast<std::uint8_t>(integer(0, d2 / 2));
      int ydeg = d2 - 2 * key.hbar;
      for (int s = 0; s < ydeg; ++s) key.y = key.y + Monomial::unit(integer(0, n - 1));
      for (int v = 0; v < n; ++v) {
        if (coin(0.25)) key.form = static_cast<std::uint16_t>(key.form | (1u << v));
      }
      w.accumulate(key, jet(alg->chart(), order, coeff_degree, 0.4));
    }
    return w;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  template <class F>
  static void enumerate(std::size_t nvars, int max_degree, F&& f) {
    std::vector<unsigned> e(nvars, 0);
    auto rec = [&](auto&& self, std::size_t v, int left) -> void {
      if (v == nvars) {
        Monomial m;
        for (std::size_t i = 0; i < nvars; ++i) m = m.with(i, e[i]);
        f(m);
        return;
      }
      for (int k = 0; k <= left; ++k) {
        e[v] = static_cast<unsigned>(k);
        self(self, v + 1, left - k);
      }
      e[v] = 0;
    };
    rec(rec, 0, max_degree);
  }

  std::mt19937_64 rng_;
};

/// Totally symmetric random Gamma_{ijk} entries for a Darboux chart.
inline std::map<std::array<std::size_t, 3>, Jet> random_symmetric_gamma(Gen& gen, std::size_t n, int order,
                                                                        const ChartPtr& chart, int degree = 2,
                                                                        double fill = 0.35) {
  std::map<std::array<std::size_t, 3>, Jet> out;
  const std::size_t d = 2 * n;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      for (std::size_t k = j; k < d; ++k) {
        if (!gen.coin(fill)) continue;
        Jet v = gen.jet(chart, order, degree, 0.3, true);
        if (v.is_zero()) continue;
        const std::array<std::size_t, 3> idx{i, j, k};
        std::array<std::size_t, 3> perm = idx;
        std::sort(perm.begin(), perm.end());
        do {
          out[perm] = v;
        } while (std::next_permutation(perm.begin(), perm.end()));
      }
    }
  }
  return out;
}

inline GeometryPtr random_darboux(Gen& gen, std::size_t n, int order, int degree = 2) {
  auto names = coordinate_names(GeometryKind::Darboux, n);
  std::vector<Complex> base;
  for (std::size_t i = 0; i < 2 * n; ++i) base.push_back(Complex(gen.rational(2)));
  auto chart = make_chart(names, base);
  return build_darboux(n, order, random_symmetric_gamma(gen, n, order, chart, degree), base);
}

/// g_{ij} = delta_{ij} + small symmetric polynomial perturbation about a generic point.
inline JetMatrix random_metric(Gen& gen, std::size_t n, int order, int degree = 2) {
  std::vector<std::string> names;
  std::vector<Complex> base;
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back(n == 1 ? "q" : "q" + std::to_string(i + 1));
    base.push_back(Complex(gen.rational(1)));
  }
  auto chart = make_chart(names, base);
  JetMatrix g(n, std::vector<Jet>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      Jet v = gen.jet(chart, order, degree, 0.4, true);
      v -= Jet::constant(chart, order, v.constant_term());
      if (i == j) v += Jet::constant(chart, order, Complex(1 + static_cast<long>(i)));
      g[i][j] = v;
      g[j][i] = v;
    }
  }
  return g;
}

/// Real Kaehler potential sum z_i zb_i + perturbation of degrees 3..max_degree.
inline Jet random_kaehler_potential(Gen& gen, std::size_t n, int order, int max_degree = 4, bool generic_base = true) {
  auto names = coordinate_names(GeometryKind::Kaehler, n);
  std::vector<Complex> base(2 * n);
  std::vector<int> partner(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    base[i] = generic_base ? Complex(gen.rational(1), gen.rational(1)) : Complex(0);
    base[n + i] = base[i].conj();
    partner[i] = static_cast<int>(n + i);
    partner[n + i] = static_cast<int>(i);
  }
  auto chart = make_chart(names, base, partner);
  std::vector<Jet::Term> terms;
  for (std::size_t i = 0; i < n; ++i) {
    terms.emplace_back(Monomial::unit(i) + Monomial::unit(n + i), Complex(1));
    // (z_i zb_i)^2 keeps the curvature away from zero
    if (max_degree >= 4) {
      Rational c = gen.rational(2);
      if (c == 0) c = 1;
      terms.emplace_back(Monomial::unit(i, 2) + Monomial::unit(n + i, 2), Complex(c));
    }
  }
  Jet k = Jet::from_terms(chart, order, terms);
  Jet pert = gen.jet(chart, order, max_degree, 0.12);
  std::vector<Jet::Term> high;
  for (const auto& [m, c] : pert.terms()) {
    if (m.degree() >= 3) high.emplace_back(m, c);
  }
  Jet h = Jet::from_terms(chart, order, high);
  return k + h + conjugate(h);
}

inline ChartPtr flat_chart(int n) {
  std::vector<std::string> names;
  std::vector<Complex> base;
  for (int i = 0; i < n; ++i) names.push_back(n == 1 ? "q" : "q" + std::to_string(i + 1));
  for (int i = 0; i < n; ++i) names.push_back(n == 1 ? "p" : "p" + std::to_string(i + 1));
  base.assign(2 * n, Complex(0));
  return make_chart(names, base);
}

}  // namespace fedosov::sampling
