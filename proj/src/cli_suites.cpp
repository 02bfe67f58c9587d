#include <algorithm>
#include <functional>
#include <map>

#include "fedosov/cli.hpp"
#include "fedosov/expr.hpp"
#include "fedosov/quantization.hpp"
#include "fedosov/sampling.hpp"

namespace fedosov::cli {

namespace {

using sampling::Gen;

struct Named {
  std::string label;
  GeometryPtr geometry;
};

/// Pass/fail over many samples, remembering the first failure.
struct Tally {
  explicit Tally(std::string n) : name(std::move(n)) {}
  std::string name;
  int count = 0;
  bool ok = true;
  std::string first;
  int compared = 1 << 20;  // lowest jet order at which coefficients were compared

  void compared_to(const StarSeries& a, const StarSeries& b) {
    const int top = std::min(a.valid_hbar_order, b.valid_hbar_order);
    for (int k = 0; k <= top; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      compared = std::min({compared, a[uk].valid_order(), b[uk].valid_order()});
    }
  }

  void expect(bool cond, const std::function<std::string()>& where) {
    ++count;
    if (!cond && ok) {
      ok = false;
      first = where();
    }
  }
  void into(Report& r, const std::string& unit) const {
    std::string detail = std::to_string(count) + " " + unit;
    if (compared < (1 << 20)) detail += ", jets compared through order " + std::to_string(compared);
    r.add(name, ok, ok ? detail : "first failure: " + first);
  }
};

std::string label(GeometryKind kind, std::size_t n, int index) {
  return std::string(kind_name(kind)) + " n=" + std::to_string(n) + " #" + std::to_string(index);
}

int order_or(const SuiteConfig& c, int fallback, int minimum = 0) {
  const int N = c.order.value_or(fallback);
  if (N < minimum) throw InputError("this suite needs --order >= " + std::to_string(minimum));
  return N;
}

GeometryPtr from_file(const SuiteConfig& c, std::initializer_list<GeometryKind> allowed) {
  const GeometryKind kind = c.geometry->kind;
  if (std::find(allowed.begin(), allowed.end(), kind) == allowed.end()) {
    throw InputError("geometry kind '" + std::string(kind_name(kind)) + "' is not supported by this suite");
  }
  return build_valid_geometry(*c.geometry);
}

FedosovState solve(const GeometryPtr& g, int N) {
  try {
    return solve_r(g, N);
  } catch (const OrderError& e) {
    throw InputError(e.what());
  }
}

GeometryPtr random_geometry(Gen& gen, GeometryKind kind, std::size_t n, int order) {
  switch (kind) {
    case GeometryKind::Flat:
      return build_flat(n, order);
    case GeometryKind::Darboux:
      return sampling::random_darboux(gen, n, order);
    case GeometryKind::Cotangent:
      return lift_cotangent(sampling::random_metric(gen, n, order + 2));
    case GeometryKind::Kaehler:
      return build_kaehler(sampling::random_kaehler_potential(gen, n, order + 3));
  }
  return nullptr;
}

/// The given file, or one random geometry per kind.
std::vector<Named> every_kind(const SuiteConfig& c, Gen& gen, int order) {
  if (c.geometry) return {{"file", build_valid_geometry(*c.geometry)}};
  std::vector<Named> out;
  out.push_back({label(GeometryKind::Flat, 2, 1), build_flat(2, order)});
  for (GeometryKind k : {GeometryKind::Darboux, GeometryKind::Cotangent, GeometryKind::Kaehler}) {
    out.push_back({label(k, 1, 1), random_geometry(gen, k, 1, order)});
  }
  return out;
}

/// Random cotangent lifts with n alternating 1, 2.
std::vector<Named> random_cotangent(const SuiteConfig& c, Gen& gen, int count, int order) {
  if (c.geometry) return {{"file", from_file(c, {GeometryKind::Cotangent, GeometryKind::Flat})}};
  std::vector<Named> out;
  for (int i = 0; i < count; ++i) {
    const std::size_t n = 1 + static_cast<std::size_t>(i % 2);
    out.push_back({label(GeometryKind::Cotangent, n, i + 1), random_geometry(gen, GeometryKind::Cotangent, n, order)});
  }
  return out;
}

void add_compat(Report& r, const std::string& prefix, const CompatReport& c) {
  for (const auto& check : c.checks) {
    const std::string name = prefix + ": " + check.name;
    if (check.informational) {
      r.notes.push_back(name + (check.location.empty() ? "" : " (" + check.location + ")"));
    } else {
      r.add(name, check.passed, check.passed ? "through hbar^" + std::to_string(check.orders) : check.location);
    }
  }
  for (const auto& n : c.notes) r.notes.push_back(prefix + ": " + n);
}

StarSeries single(const Jet& f) { return StarSeries{{f}, 1 << 20}; }

/// (sum_a hbar^a A_a) * (sum_b hbar^b B_b); the product of A_a and B_b only needs
/// star coefficients through hbar^(N - a - b).
StarSeries star_series(const StarSeries& a, const StarSeries& b, const FedosovState& s) {
  const int top = s.target_order;
  StarSeries out;
  out.valid_hbar_order = std::min({top, a.valid_hbar_order, b.valid_hbar_order});
  for (int m = 0; m <= top; ++m) out.coefficients.emplace_back(s.geometry->chart, 1 << 20);
  for (int i = 0; i < static_cast<int>(a.coefficients.size()) && i <= top; ++i) {
    for (int j = 0; i + j <= top && j < static_cast<int>(b.coefficients.size()); ++j) {
      const FedosovState view = with_target_order(s, top - i - j);
      StarSeries p = star(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(j)], view);
      for (int c = 0; i + j + c <= top; ++c) out.coefficients[static_cast<std::size_t>(i + j + c)] += p[static_cast<std::size_t>(c)];
    }
  }
  return out;
}

std::string first_power_difference(const StarSeries& a, const StarSeries& b) {
  const int top = std::min(a.valid_hbar_order, b.valid_hbar_order);
  for (int k = 0; k <= top; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    if (!agree(a[uk], b[uk])) return "hbar^" + std::to_string(k) + ": difference " + (a[uk] - b[uk]).str();
  }
  return "";
}

std::string sample_where(const std::string& geom, int sample, const std::string& extra = {}) {
  return geom + ", sample " + std::to_string(sample) + (extra.empty() ? "" : ", " + extra);
}

/// Order of the jets used for the inputs of nested products through hbar^N.
int nested_order(int N) { return 4 * N + 5; }

Report suite_moyal_flat(const SuiteConfig& c) {
  const int N = order_or(c, 4);
  const int samples = c.samples.value_or(10);
  const int order = required_geometry_order(N);
  Gen gen(c.seed);
  std::map<std::size_t, FedosovState> states;
  std::vector<std::size_t> dims{1, 2};
  if (c.geometry) {
    if (c.geometry->kind != GeometryKind::Flat) throw InputError("moyal-flat needs a flat geometry");
    states.emplace(c.geometry->n, solve(build_valid_geometry(*c.geometry), N));
    dims = {c.geometry->n};
  } else {
    for (std::size_t n : dims) states.emplace(n, solve(build_flat(n, order), N));
  }
  Tally t{"star == Moyal through hbar^" + std::to_string(N)};
  for (int s = 0; s < samples; ++s) {
    const std::size_t n = dims[static_cast<std::size_t>(s) % dims.size()];
    const FedosovState& st = states.at(n);
    const int fo = st.geometry->order;
    Jet f = gen.jet(st.geometry->chart, fo, 4), g = gen.jet(st.geometry->chart, fo, 4);
    StarSeries fg = star(f, g, st), m = moyal_reference(f, g, n, N);
    t.compared_to(fg, m);
    t.expect(agree(fg, m), [&] { return sample_where("flat n=" + std::to_string(n), s, first_power_difference(fg, m)); });
  }
  Report r;
  t.into(r, "pairs");
  return r;
}

Report suite_associativity(const SuiteConfig& c) {
  const int N = order_or(c, 3);
  const int samples = c.samples.value_or(3);
  Gen gen(c.seed);
  Report r;
  for (const auto& [name, g] : every_kind(c, gen, nested_order(N))) {
    FedosovState s = solve(g, N);
    if (g->order < nested_order(N)) {
      throw InputError("associativity through hbar^" + std::to_string(N) + " needs geometry order " +
                       std::to_string(nested_order(N)));
    }
    Tally t{name + ": (f*g)*h == f*(g*h) through hbar^" + std::to_string(N)};
    for (int i = 0; i < samples; ++i) {
      Jet f = gen.jet(g->chart, g->order, 2), h = gen.jet(g->chart, g->order, 2), k = gen.jet(g->chart, g->order, 2);
      StarSeries lhs = star_series(star(f, h, s), single(k), s);
      StarSeries rhs = star_series(single(f), star(h, k, s), s);
      t.compared_to(lhs, rhs);
      t.expect(agree(lhs, rhs), [&] { return sample_where(name, i, first_power_difference(lhs, rhs)); });
    }
    t.into(r, "triples");
  }
  return r;
}

Report suite_correspondence(const SuiteConfig& c) {
  const int N = order_or(c, 1, 1);
  const int samples = c.samples.value_or(5);
  Gen gen(c.seed);
  Report r;
  for (const auto& [name, g] : every_kind(c, gen, required_geometry_order(N))) {
    FedosovState s = solve(g, N);
    Tally t{name + ": f*g - g*f = i hbar {f,g} + O(hbar^2)"};
    Tally unit{name + ": 1*f = f*1 = f"};
    const Jet one = Jet::constant(g->chart, g->order, Complex(1));
    for (int i = 0; i < samples; ++i) {
      Jet f = gen.jet(g->chart, g->order, 3), h = gen.jet(g->chart, g->order, 3);
      StarSeries fh = star(f, h, s), hf = star(h, f, s);
      const bool ok = agree(fh[0] - hf[0], Jet(g->chart, g->order)) && agree(fh[1] - hf[1], poisson(f, h, *g) * Complex::i());
      t.expect(ok, [&] { return sample_where(name, i); });
      StarSeries left = star(one, f, s), right = star(f, one, s);
      bool u = agree(left[0], f) && agree(right[0], f);
      for (int k = 1; k <= N; ++k) u = u && left[static_cast<std::size_t>(k)].is_zero() && right[static_cast<std::size_t>(k)].is_zero();
      unit.expect(u, [&] { return sample_where(name, i); });
    }
    t.into(r, "pairs");
    unit.into(r, "functions");
  }
  return r;
}

Monomial ys(std::initializer_list<std::size_t> idx) {
  Monomial m;
  for (std::size_t i : idx) m = m + Monomial::unit(i);
  return m;
}

std::uint16_t dx(std::size_t l) { return static_cast<std::uint16_t>(1u << l); }

Report suite_r_terms(const SuiteConfig& c) {
  const int N = order_or(c, 2, 2);
  const int samples = c.samples.value_or(4);
  Gen gen(c.seed);
  std::vector<Named> geoms;
  if (c.geometry) {
    geoms.push_back({"file", build_valid_geometry(*c.geometry)});
  } else {
    for (int i = 0; i < samples; ++i) {
      const std::size_t n = 1 + static_cast<std::size_t>(i % 2);
      geoms.push_back({label(GeometryKind::Darboux, n, i + 1), random_geometry(gen, GeometryKind::Darboux, n, required_geometry_order(N))});
    }
  }
  Report r;
  for (const auto& [name, g] : geoms) {
    FedosovState s = solve(g, N);
    FlatnessReport flat = check_flatness(s);
    r.add(name + ": Fedosov equation, delta^-1 r = 0, no scalar part", flat.empty(), flat.empty() ? "" : flat.str());
    const std::size_t d = g->dim();
    CurvatureData cd = curvature(*g);
    WeylForm r3(g->algebra, s.degree_cap), r4(g->algebra, s.degree_cap);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = 0; k < d; ++k) {
          for (std::size_t l = 0; l < d; ++l) {
            r3.accumulate_scaled(WeylKey{0, ys({i, j, k}), dx(l)}, cd.low[i][j][k][l], Complex(Rational(-1, 8)));
            for (std::size_t m = 0; m < d; ++m) {
              Jet t = partial(cd.low[i][j][k][l], m);
              for (std::size_t q = 0; q < d; ++q) {
                t -= g->gamma[q][m][i] * cd.low[q][j][k][l] + g->gamma[q][m][j] * cd.low[i][q][k][l] +
                     g->gamma[q][m][k] * cd.low[i][j][q][l] + g->gamma[q][m][l] * cd.low[i][j][k][q];
              }
              r4.accumulate_scaled(WeylKey{0, ys({i, j, k, m}), dx(l)}, t, Complex(Rational(-1, 40)));
            }
          }
        }
      }
    }
    r.add(name + ": r(3) = -1/8 R_ijkl y^i y^j y^k dx^l", agree(project(s.r, GradedProjection::hbar_degree2(3)), r3));
    r.add(name + ": r(4) = -1/40 (nabla_m R_ijkl) y^i y^j y^k y^m dx^l",
          agree(project(s.r, GradedProjection::hbar_degree2(4)), r4));
  }
  return r;
}

Report suite_homogeneity(const SuiteConfig& c) {
  const int N = order_or(c, 3, 1);
  Gen gen(c.seed);
  Report r;
  int i = 0;
  for (const auto& [name, g] : random_cotangent(c, gen, c.samples.value_or(5), required_geometry_order(N))) {
    add_compat(r, name, check_homogeneity(solve(g, N), 2, c.seed + static_cast<std::uint64_t>(i++)));
  }
  return r;
}

Report suite_kompi(const SuiteConfig& c) {
  const int N = order_or(c, 3, 1);
  Gen gen(c.seed);
  Report r;
  int i = 0;
  for (const auto& [name, g] : random_cotangent(c, gen, c.samples.value_or(5), required_geometry_order(N))) {
    add_compat(r, name, check_kompi(solve(g, N), 2, c.seed + static_cast<std::uint64_t>(i++)));
  }
  return r;
}

GeometryPtr round_sphere(int order) {
  auto base = make_chart({"q1", "q2"}, {Complex(Rational(1, 2)), Complex(Rational(1, 3))});
  Jet conf = expr::elaborate("4/(1+q1^2+q2^2)^2", base, order + 2);
  const Jet zero(base, order + 2);
  return lift_cotangent({{conf, zero}, {zero, conf}});
}

Report suite_kinetic_alpha(const SuiteConfig& c) {
  const int N = order_or(c, 2, 2);
  const int order = required_geometry_order(N);
  Gen gen(c.seed);
  std::vector<Named> geoms;
  if (c.geometry) {
    geoms.push_back({"file", from_file(c, {GeometryKind::Cotangent})});
  } else {
    geoms.push_back({"round sphere", round_sphere(order)});
    const int count = c.samples.value_or(3);
    for (int i = 0; i < count; ++i) {
      geoms.push_back({label(GeometryKind::Cotangent, 2, i + 1), random_geometry(gen, GeometryKind::Cotangent, 2, order)});
    }
  }
  Report r;
  for (const auto& [name, g] : geoms) {
    KineticResult k = kinetic_alpha(solve(g, N));
    const bool ok = k.pure_multiplication && k.alpha && *k.alpha == Rational(1, 4);
    std::string detail = k.alpha ? "alpha = " + rational_str(*k.alpha) : "alpha undetermined";
    if (!k.pure_multiplication) detail += "; " + k.detail;
    r.add(name + ": rho(g^ab p_a p_b) = -hbar^2 (Delta - R/4)", ok, detail);
  }
  return r;
}

Report suite_kaehler_orders(const SuiteConfig& c) {
  const int N = order_or(c, 3, 3);
  const int order = required_geometry_order(N);
  Gen gen(c.seed);
  std::vector<Named> geoms;
  if (c.geometry) {
    geoms.push_back({"file", from_file(c, {GeometryKind::Kaehler})});
  } else {
    const int count = c.samples.value_or(5);
    for (int i = 0; i < count; ++i) {
      const std::size_t n = 1 + static_cast<std::size_t>(i % 2);
      geoms.push_back({label(GeometryKind::Kaehler, n, i + 1), random_geometry(gen, GeometryKind::Kaehler, n, order)});
    }
  }
  Report r;
  int i = 0;
  for (const auto& [name, g] : geoms) {
    add_compat(r, name, check_kaehler_orders(solve(g, N), 1, c.seed + static_cast<std::uint64_t>(i++)));
  }
  return r;
}

Report suite_flat_reps(const SuiteConfig& c) {
  const int N = order_or(c, 3, 1);
  Gen gen(c.seed);
  Report r;
  for (std::size_t n : {std::size_t{1}, std::size_t{2}}) {
    add_compat(r, "n=" + std::to_string(n), flat_reps(n, N));
  }
  // Factorization independence of rho_extend on random momentum polynomials: cubic on
  // n = 1 lifts, quadratic on n = 2 lifts (cubic terms there need order 11 in four variables).
  const int samples = c.samples.value_or(10);
  std::vector<Named> geoms;
  std::vector<int> degrees;
  if (c.geometry) {
    geoms = random_cotangent(c, gen, 1, 0);
    degrees = {geoms[0].geometry->order >= 11 ? 3 : 2};
  } else {
    geoms = {{label(GeometryKind::Cotangent, 1, 1), random_geometry(gen, GeometryKind::Cotangent, 1, 11)},
             {label(GeometryKind::Cotangent, 2, 2), random_geometry(gen, GeometryKind::Cotangent, 2, 9)}};
    degrees = {3, 2};
  }
  std::vector<FedosovState> states;
  for (const auto& ng : geoms) states.push_back(solve(ng.geometry, 3));
  Tally t{"rho_extend independent of factorization"};
  for (int i = 0; i < samples; ++i) {
    const std::size_t which = static_cast<std::size_t>(i) % states.size();
    const FedosovState& s = states[which];
    const ChartGeometry& g = *s.geometry;
    const ChartPtr config = configuration_chart(g);
    const auto p = g.second_block();
    const int top = degrees[which];
    // sum of c_beta(q) p^beta over |beta| <= top, always with a top-degree term
    std::vector<Monomial> betas{Monomial()};
    for (std::size_t at = 0; at < betas.size(); ++at) {
      if (static_cast<int>(betas[at].degree()) == top) continue;
      for (std::size_t a = 0; a < g.n; ++a) {
        const Monomial next = betas[at] + Monomial::unit(p[a]);
        if (std::find(betas.begin(), betas.end(), next) == betas.end()) betas.push_back(next);
      }
    }
    Jet f(g.chart, g.order);
    bool has_top = false;
    for (Monomial b : betas) {
      const bool last = b == betas.back();
      if (!gen.coin(0.5) && !(last && !has_top)) continue;
      Jet coeff = lift_to_phase_space(gen.jet(config, g.order, 2), g);
      if (coeff.is_zero()) coeff = Jet::constant(g.chart, g.order, Complex(1));
      f += coeff * Jet::monomial(g.chart, g.order, b);
      has_top = has_top || static_cast<int>(b.degree()) == top;
    }
    RhoResult res = rho_extend_checked(f, s, false);
    t.expect(res.consistent, [&] { return sample_where(geoms[which].label, i, res.detail); });
  }
  t.into(r, "momentum polynomials");
  return r;
}

using SuiteFn = Report (*)(const SuiteConfig&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r{
      {"moyal-flat", suite_moyal_flat},
      {"associativity", suite_associativity},
      {"correspondence", suite_correspondence},
      {"r-terms", suite_r_terms},
      {"cotangent-homogeneity", suite_homogeneity},
      {"kompi", suite_kompi},
      {"kaehler-orders", suite_kaehler_orders},
      {"kinetic-alpha", suite_kinetic_alpha},
      {"flat-reps", suite_flat_reps},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [n, f] : registry()) out.push_back(n);
    return out;
  }();
  return names;
}

Report run_suite(const std::string& name, const SuiteConfig& config) {
  for (const auto& [n, f] : registry()) {
    if (n == name) {
      Report r = f(config);
      r.seed = config.seed;
      return r;
    }
  }
  std::string known;
  for (const auto& n : suite_names()) known += (known.empty() ? "" : ", ") + n;
  throw InputError("unknown suite '" + name + "' (known: " + known + ")");
}

}  // namespace fedosov::cli
