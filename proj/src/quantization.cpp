#include "fedosov/quantization.hpp"

#include <sstream>

#include "fedosov/error.hpp"

namespace fedosov {

namespace {

bool vanishes(const Jet& j) { return agree(j, Jet(j.chart(), j.valid_order())); }

bool is_cotangent_like(const ChartGeometry& g) {
  return g.kind == GeometryKind::Cotangent || g.kind == GeometryKind::Flat;
}

void require_cotangent(const ChartGeometry& g, const char* what) {
  if (!is_cotangent_like(g)) throw StructureError(std::string(what) + " needs a cotangent or flat geometry");
  for (std::size_t i : g.second_block()) {
    if (!g.chart->base(i).is_zero()) throw StructureError(std::string(what) + " needs momenta based at p = 0");
  }
}

Jet to_configuration(const Jet& a, const ChartGeometry& g, const ChartPtr& config) {
  return restrict_to(coefficient_in(a, g.second_block(), Monomial()), config, g.first_block());
}

/// g = det g_ij and (1/2) d_j g / g on the configuration chart; flat charts give g = 1.
std::vector<Jet> half_log_det_gradient(const ChartGeometry& g, const ChartPtr& config) {
  std::vector<Jet> out;
  if (g.kind == GeometryKind::Flat) {
    for (std::size_t j = 0; j < g.n; ++j) out.emplace_back(config, g.order + 2);
    return out;
  }
  const Jet det = determinant(g.metric);
  const Jet inv = invert(det);
  for (std::size_t j = 0; j < g.n; ++j) out.push_back(partial(det, j) * inv * Complex(Rational(1, 2)));
  return out;
}

Jet holomorphic_part(const Jet& a, const ChartGeometry& g, const ChartPtr& config) {
  return restrict_to(coefficient_in(a, g.second_block(), Monomial()), config, g.first_block());
}

}  // namespace

ChartPtr configuration_chart(const ChartGeometry& g) {
  if (g.kind == GeometryKind::Cotangent && g.base_chart) return g.base_chart;
  std::vector<std::string> names;
  std::vector<Complex> base;
  for (std::size_t i : g.first_block()) {
    names.push_back(g.chart->name(i));
    base.push_back(g.chart->base(i));
  }
  return make_chart(names, base);
}

Jet lift_to_phase_space(const Jet& psi, const ChartGeometry& g) {
  return extend_to(psi, g.chart, g.first_block(), psi.valid_order());
}

AffineObservable split_affine_cotangent(const Jet& f, const ChartGeometry& g) {
  require_cotangent(g, "cotangent quantization");
  if (!same_chart(f.chart(), g.chart)) throw ChartMismatch("observable is not on the phase-space chart");
  const auto pvars = g.second_block();
  if (degree_in(f, pvars) > 1) throw StructureError("observable is not affine in the momenta");
  const ChartPtr config = configuration_chart(g);
  AffineObservable out;
  out.b = to_configuration(f, g, config);
  for (std::size_t i = 0; i < g.n; ++i) {
    out.a.push_back(restrict_to(coefficient_in(f, pvars, Monomial::unit(pvars[i])), config, g.first_block()));
  }
  return out;
}

DiffOp gq_cotangent(const Jet& f, const ChartGeometry& g) {
  const AffineObservable obs = split_affine_cotangent(f, g);
  const ChartPtr config = obs.b.chart();
  const std::vector<Jet> dlog = half_log_det_gradient(g, config);
  const Complex mi(Rational(0), Rational(-1));
  DiffOp out(config);
  out.add(Monomial(), 0, obs.b);
  Jet div(config, obs.b.valid_order());
  for (std::size_t j = 0; j < g.n; ++j) {
    if (obs.a[j].is_zero()) continue;
    out.add(Monomial::unit(j), 1, obs.a[j] * mi);
    div += partial(obs.a[j], j) + obs.a[j] * dlog[j];
  }
  out.add(Monomial(), 1, div * Complex(Rational(0), Rational(-1, 2)));
  return out;
}

KaehlerAffine split_affine_kaehler(const Jet& f, const ChartGeometry& g) {
  if (g.kind != GeometryKind::Kaehler || !g.potential) throw StructureError("Kaehler quantization needs a Kaehler geometry");
  if (!same_chart(f.chart(), g.chart)) throw ChartMismatch("observable is not on the phase-space chart");
  const std::size_t n = g.n;
  const Jet& K = *g.potential;
  const ChartPtr config = configuration_chart(g);
  KaehlerAffine out;
  Jet v = f;
  for (std::size_t a = 0; a < n; ++a) {
    // d_{zb_b} f = u^a A_{a bb}, so u^a = d_{zb_b} f A^{bb a}
    Jet u(g.chart, f.valid_order());
    for (std::size_t b = 0; b < n; ++b) u += partial(f, n + b) * g.kaehler_a_inv[b][a];
    for (std::size_t c = 0; c < n; ++c) {
      if (!vanishes(partial(u, n + c))) throw StructureError("observable is not of the form u^a(z) d_a K + v(z)");
    }
    v -= u * partial(K, a);
    out.u.push_back(holomorphic_part(u, g, config));
  }
  for (std::size_t c = 0; c < n; ++c) {
    if (!vanishes(partial(v, n + c))) throw StructureError("observable is not of the form u^a(z) d_a K + v(z)");
  }
  out.v = holomorphic_part(v, g, config);
  return out;
}

DiffOp gq_kaehler(const Jet& f, const ChartGeometry& g) {
  const KaehlerAffine obs = split_affine_kaehler(f, g);
  DiffOp out(obs.v.chart());
  out.add(Monomial(), 0, obs.v);
  Jet div(obs.v.chart(), obs.v.valid_order());
  for (std::size_t a = 0; a < g.n; ++a) {
    if (obs.u[a].is_zero()) continue;
    out.add(Monomial::unit(a), 1, obs.u[a]);
    div += partial(obs.u[a], a);
  }
  out.add(Monomial(), 1, div * Complex(Rational(1, 2)));
  return out;
}

std::string_view factorization_name(Factorization f) {
  switch (f) {
    case Factorization::AffineLeft:
      return "p_i * rest";
    case Factorization::AffineRight:
      return "rest * p_i";
    case Factorization::CoefficientLeft:
      return "(c p_i) * p^rest";
  }
  return "?";
}

namespace {

struct RhoContext {
  const FedosovState& state;
  const ChartGeometry& g;
  std::vector<std::size_t> pvars;
  /// state viewed at each target order, built on demand
  mutable std::map<int, FedosovState> views;
  /// flat sections by (target order, jet); factorizations share many factors
  mutable std::map<std::pair<int, std::string>, WeylForm> sections;

  const FedosovState& at_order(int n) const {
    auto it = views.find(n);
    if (it == views.end()) it = views.emplace(n, with_target_order(state, n)).first;
    return it->second;
  }

  const WeylForm& section(const Jet& f, int n) const {
    std::pair<int, std::string> key{n, std::to_string(f.valid_order()) + ":" + f.str()};
    auto it = sections.find(key);
    if (it == sections.end()) it = sections.emplace(std::move(key), flat_section(f, at_order(n))).first;
    return it->second;
  }

  StarSeries star(const Jet& u, const Jet& v, int n) const {
    return star_sections(section(u, n), section(v, n), at_order(n));
  }
};

/// c * x^beta with the validity it actually has: valid(c) + |beta|.
Jet times_monomial(const Jet& c, Monomial beta) {
  std::vector<Jet::Term> terms;
  for (const auto& [m, v] : c.terms()) terms.emplace_back(m + beta, v);
  return Jet::from_terms(c.chart(), c.valid_order() + static_cast<int>(beta.degree()), std::move(terms));
}

DiffOp rho_rec(const Jet& f, const RhoContext& ctx, Factorization strategy, std::size_t split);

/// rho(c p^alpha), |alpha| >= 2.
DiffOp rho_monomial(const Jet& c, Monomial alpha, const RhoContext& ctx, Factorization strategy, std::size_t split) {
  const ChartGeometry& g = ctx.g;
  std::vector<std::size_t> present;
  for (std::size_t i = 0; i < g.n; ++i) {
    if (alpha[ctx.pvars[i]] > 0) present.push_back(i);
  }
  const std::size_t i = present[split % present.size()];
  const Monomial pi_mono = Monomial::unit(ctx.pvars[i]);
  const Monomial rest_alpha = alpha - pi_mono;
  const int deg = static_cast<int>(alpha.degree());
  const int top = c.valid_order() + deg;
  const Jet one = Jet::constant(g.chart, top, Complex(1));
  Jet u, v;
  switch (strategy) {
    case Factorization::AffineLeft:
      u = times_monomial(one, pi_mono);
      v = times_monomial(c, rest_alpha);
      break;
    case Factorization::AffineRight:
      u = times_monomial(c, rest_alpha);
      v = times_monomial(one, pi_mono);
      break;
    case Factorization::CoefficientLeft:
      u = times_monomial(c, pi_mono);
      v = times_monomial(one, rest_alpha);
      break;
  }
  if (deg > ctx.state.target_order) {
    throw OrderError("rho of a degree-" + std::to_string(deg) + " polynomial needs a Fedosov state through hbar^" +
                     std::to_string(deg));
  }
  StarSeries s = ctx.star(u, v, deg);
  // rho(u v) = rho(u) rho(v) - sum_{k >= 1} hbar^k rho(C_k)
  DiffOp out = diffop_compose(rho_rec(u, ctx, strategy, split), rho_rec(v, ctx, strategy, split));
  for (int k = 1; k <= deg; ++k) {
    const Jet& ck = s[static_cast<std::size_t>(k)];
    if (vanishes(ck)) continue;
    if (degree_in(ck, ctx.pvars) >= deg) {
      throw StructureError("hbar^" + std::to_string(k) + " coefficient of a star product does not lower the momentum degree");
    }
    out -= rho_rec(ck, ctx, strategy, split).shift_hbar(k);
  }
  return out;
}

DiffOp rho_rec(const Jet& f, const RhoContext& ctx, Factorization strategy, std::size_t split) {
  if (degree_in(f, ctx.pvars) <= 1) return gq_cotangent(f, ctx.g);
  // Affine part plus one operator per momentum monomial of degree >= 2.
  std::map<Monomial, bool> shapes;
  for (const auto& [m, c] : f.terms()) {
    Monomial pm;
    for (std::size_t v : ctx.pvars) pm = pm.with(v, m[v]);
    shapes[pm] = true;
  }
  Jet affine = f;
  DiffOp out(configuration_chart(ctx.g));
  for (const auto& [pm, unused] : shapes) {
    if (pm.degree() < 2) continue;
    const Jet c = coefficient_in(f, ctx.pvars, pm);
    affine -= times_monomial(c, pm);
    out += rho_monomial(c, pm, ctx, strategy, split);
  }
  out += gq_cotangent(affine, ctx.g);
  return out;
}

}  // namespace

DiffOp rho_extend(const Jet& f, const FedosovState& state, Factorization strategy) {
  if (!state.geometry) throw StateError("Fedosov state has no geometry");
  const ChartGeometry& g = *state.geometry;
  require_cotangent(g, "rho_extend");
  RhoContext ctx{state, g, g.second_block(), {}, {}};
  return rho_rec(f, ctx, strategy, 0);
}

RhoResult rho_extend_checked(const Jet& f, const FedosovState& state, bool throw_on_mismatch) {
  if (!state.geometry) throw StateError("Fedosov state has no geometry");
  const ChartGeometry& g = *state.geometry;
  require_cotangent(g, "rho_extend");
  RhoContext ctx{state, g, g.second_block(), {}, {}};
  RhoResult res;
  res.op = rho_rec(f, ctx, Factorization::AffineLeft, 0);
  for (Factorization s : {Factorization::AffineLeft, Factorization::AffineRight, Factorization::CoefficientLeft}) {
    for (std::size_t split = 0; split < g.n; ++split) {
      if (s == Factorization::AffineLeft && split == 0) continue;
      DiffOp other = rho_rec(f, ctx, s, split);
      if (!agree(res.op, other)) {
        res.consistent = false;
        std::ostringstream os;
        os << "factorization '" << factorization_name(s) << "' splitting momentum " << split + 1
           << " disagrees with 'p_i * rest'; difference:\n"
           << (other - res.op).str();
        res.detail = os.str();
        if (throw_on_mismatch) throw StructureError("rho_extend: " + res.detail);
        return res;
      }
    }
  }
  return res;
}

DiffOp laplace_beltrami(const JetMatrix& metric) {
  const std::size_t n = metric.size();
  const ChartPtr& chart = metric[0][0].chart();
  const JetMatrix inv = invert_matrix(metric);
  const Jet det = determinant(metric);
  const Jet det_inv = invert(det);
  DiffOp out(chart);
  for (std::size_t b = 0; b < n; ++b) {
    Jet first(chart, metric[0][0].valid_order());
    for (std::size_t a = 0; a < n; ++a) {
      out.add(Monomial::unit(a) + Monomial::unit(b), 0, inv[a][b]);
      first += partial(inv[a][b], a) + inv[a][b] * partial(det, a) * det_inv * Complex(Rational(1, 2));
    }
    out.add(Monomial::unit(b), 0, first);
  }
  return out;
}

Jet scalar_curvature(const JetMatrix& metric) {
  const std::size_t n = metric.size();
  const JetMatrix inv = invert_matrix(metric);
  const Tensor4 r = curvature_from_gamma(levi_civita(metric));
  Jet s(metric[0][0].chart(), metric[0][0].valid_order());
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t l = 0; l < n; ++l) {
      for (std::size_t i = 0; i < n; ++i) s += inv[j][l] * r[i][j][i][l];
    }
  }
  return s;
}

Jet kinetic_observable(const ChartGeometry& g) {
  require_cotangent(g, "kinetic energy");
  const auto p = g.second_block();
  const int order = g.order + 2;
  Jet out(g.chart, order);
  for (std::size_t a = 0; a < g.n; ++a) {
    for (std::size_t b = 0; b < g.n; ++b) {
      Jet gab = g.kind == GeometryKind::Flat
                    ? Jet::constant(g.chart, order, Complex(a == b ? 1 : 0))
                    : extend_to(g.metric_inv[a][b], g.chart, g.first_block(), order);
      out += gab * Jet::variable(g.chart, order, p[a]) * Jet::variable(g.chart, order, p[b]);
    }
  }
  return out;
}

KineticResult kinetic_alpha(const FedosovState& state) {
  if (!state.geometry) throw StateError("Fedosov state has no geometry");
  const ChartGeometry& g = *state.geometry;
  require_cotangent(g, "kinetic_alpha");
  KineticResult res;
  res.rho = rho_extend_checked(kinetic_observable(g), state).op;
  const ChartPtr config = configuration_chart(g);
  JetMatrix metric = g.metric;
  if (g.kind == GeometryKind::Flat) {
    metric.assign(g.n, std::vector<Jet>(g.n, Jet(config, g.order + 2)));
    for (std::size_t i = 0; i < g.n; ++i) metric[i][i] = Jet::constant(config, g.order + 2, Complex(1));
  }
  res.residual = res.rho + laplace_beltrami(metric).shift_hbar(2);
  res.pure_multiplication = true;
  for (const auto& [alpha, cs] : res.residual.terms()) {
    for (std::size_t k = 0; k < cs.size(); ++k) {
      if (vanishes(cs[k])) continue;
      if (alpha != Monomial() || k != 2) res.pure_multiplication = false;
    }
  }
  if (!res.pure_multiplication) {
    res.detail = "rho(g^ab p_a p_b) + hbar^2 Delta is not a multiplication operator:\n" + res.residual.str();
    return res;
  }
  const Jet r = scalar_curvature(metric);
  const Jet m = res.residual.coeff(Monomial(), 2, r.valid_order());
  if (vanishes(r)) {
    res.detail = vanishes(m) ? "scalar curvature vanishes; alpha undetermined" : "residual is nonzero but R vanishes";
    if (!vanishes(m)) res.pure_multiplication = false;
    return res;
  }
  // alpha from the lowest nonvanishing coefficient of R, then checked on the whole jet
  const auto& lead = r.terms().front();
  const Complex ratio = m.coeff(lead.first) / lead.second;
  if (sgn(ratio.im()) != 0) {
    res.detail = "residual / R is not real: " + ratio.str();
    return res;
  }
  if (!agree(m, r * ratio)) {
    res.detail = "residual is not a constant multiple of R";
    return res;
  }
  res.alpha = ratio.re();
  res.detail = "alpha = " + ratio.str();
  return res;
}

}  // namespace fedosov
