#include "fedosov/geometry.hpp"

#include <sstream>

#include "fedosov/error.hpp"

namespace fedosov {

std::string_view kind_name(GeometryKind kind) {
  switch (kind) {
    case GeometryKind::Flat: return "flat";
    case GeometryKind::Darboux: return "darboux";
    case GeometryKind::Cotangent: return "cotangent";
    case GeometryKind::Kaehler: return "kaehler";
  }
  return "?";
}

std::optional<GeometryKind> kind_from_name(std::string_view name) {
  if (name == "flat") return GeometryKind::Flat;
  if (name == "darboux") return GeometryKind::Darboux;
  if (name == "cotangent") return GeometryKind::Cotangent;
  if (name == "kaehler") return GeometryKind::Kaehler;
  return std::nullopt;
}

Tensor3 make_tensor3(const ChartPtr& chart, std::size_t n, int order) {
  return Tensor3(n, JetMatrix(n, std::vector<Jet>(n, Jet(chart, order))));
}

Tensor4 make_tensor4(const ChartPtr& chart, std::size_t n, int order) {
  return Tensor4(n, make_tensor3(chart, n, order));
}

std::vector<std::size_t> ChartGeometry::first_block() const {
  std::vector<std::size_t> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(i);
  return v;
}

std::vector<std::size_t> ChartGeometry::second_block() const {
  std::vector<std::size_t> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(n + i);
  return v;
}

std::vector<std::string> coordinate_names(GeometryKind kind, std::size_t n) {
  const bool complex = kind == GeometryKind::Kaehler;
  const std::string a = complex ? "z" : "q";
  const std::string b = complex ? "zb" : "p";
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back(n == 1 ? a : a + std::to_string(i + 1));
  for (std::size_t i = 0; i < n; ++i) names.push_back(n == 1 ? b : b + std::to_string(i + 1));
  return names;
}

namespace {

Jet zero(const ChartPtr& chart, int order) { return Jet(chart, order); }
Jet constant(const ChartPtr& chart, int order, Complex c) { return Jet::constant(chart, order, std::move(c)); }

std::string index_str(std::initializer_list<std::size_t> idx) {
  std::string s = "(";
  bool first = true;
  for (auto i : idx) {
    if (!first) s += ",";
    first = false;
    s += std::to_string(i + 1);
  }
  return s + ")";
}

/// Constant Darboux pair omega_{n+i,i} = 1 = -omega_{i,n+i} and its inverse.
void set_darboux_omega(ChartGeometry& g) {
  const std::size_t d = g.dim();
  g.omega.assign(d, std::vector<Jet>(d, zero(g.chart, g.order)));
  g.omega_inv.assign(d, std::vector<Jet>(d, zero(g.chart, g.order)));
  for (std::size_t i = 0; i < g.n; ++i) {
    g.omega[g.n + i][i] = constant(g.chart, g.order, Complex(1));
    g.omega[i][g.n + i] = constant(g.chart, g.order, Complex(-1));
    g.omega_inv[i][g.n + i] = constant(g.chart, g.order, Complex(1));
    g.omega_inv[g.n + i][i] = constant(g.chart, g.order, Complex(-1));
  }
}

/// Gamma^m_{jk} = omega^{mi} Gamma_{ijk}
Tensor3 raise_gamma(const ChartGeometry& g, const Tensor3& low) {
  const std::size_t d = g.dim();
  Tensor3 up = make_tensor3(g.chart, d, g.order);
  for (std::size_t m = 0; m < d; ++m) {
    for (std::size_t i = 0; i < d; ++i) {
      if (g.omega_inv[m][i].is_zero()) continue;
      for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = 0; k < d; ++k) {
          if (!low[i][j][k].is_zero()) up[m][j][k] += g.omega_inv[m][i] * low[i][j][k];
        }
      }
    }
  }
  return up;
}

/// Gamma_{ijk} = omega_{il} Gamma^l_{jk}
Tensor3 lower_gamma(const ChartGeometry& g, const Tensor3& up) {
  const std::size_t d = g.dim();
  Tensor3 low = make_tensor3(g.chart, d, g.order);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t l = 0; l < d; ++l) {
      if (g.omega[i][l].is_zero()) continue;
      for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = 0; k < d; ++k) {
          if (!up[l][j][k].is_zero()) low[i][j][k] += g.omega[i][l] * up[l][j][k];
        }
      }
    }
  }
  return low;
}

void finish(ChartGeometry& g, bool validate) {
  g.algebra = std::make_shared<const WeylAlgebra>(g.chart, g.omega_inv);
  if (validate) {
    ValidationReport report = validate_connection(g);
    if (!report.ok()) throw StructureError("connection failed validation:\n" + report.str());
  }
}

std::vector<Complex> default_base(std::vector<Complex> base, std::size_t d) {
  if (base.empty()) base.assign(d, Complex(0));
  if (base.size() != d) throw DomainError("base point has " + std::to_string(base.size()) +
                                          " entries, expected " + std::to_string(d));
  return base;
}

}  // namespace

GeometryPtr build_flat(std::size_t n, int order, std::vector<Complex> base_point) {
  if (n < 1 || 2 * n > kMaxVariables) throw DomainError("flat chart needs 1 <= n <= 4");
  auto g = std::make_shared<ChartGeometry>();
  g->kind = GeometryKind::Flat;
  g->n = n;
  g->order = order;
  g->chart = make_chart(coordinate_names(GeometryKind::Flat, n), default_base(std::move(base_point), 2 * n));
  set_darboux_omega(*g);
  g->gamma = make_tensor3(g->chart, 2 * n, order);
  g->gamma_low = make_tensor3(g->chart, 2 * n, order);
  finish(*g, false);
  return g;
}

GeometryPtr build_darboux(std::size_t n, int order, const std::map<std::array<std::size_t, 3>, Jet>& gamma_low,
                          std::vector<Complex> base_point, bool validate) {
  if (n < 1 || 2 * n > kMaxVariables) throw DomainError("Darboux chart needs 1 <= n <= 4");
  auto g = std::make_shared<ChartGeometry>();
  g->kind = GeometryKind::Darboux;
  g->n = n;
  g->order = order;
  g->chart = make_chart(coordinate_names(GeometryKind::Darboux, n), default_base(std::move(base_point), 2 * n));
  set_darboux_omega(*g);
  g->gamma_low = make_tensor3(g->chart, 2 * n, order);
  for (const auto& [idx, value] : gamma_low) {
    for (auto i : idx) {
      if (i >= 2 * n) throw DomainError("gamma index out of range");
    }
    if (value.chart() && value.chart()->names() != g->chart->names()) {
      throw ChartMismatch("gamma entry lives on a different chart");
    }
    g->gamma_low[idx[0]][idx[1]][idx[2]] = Jet::from_terms(g->chart, order, value.terms()).truncated(
        std::min(order, value.valid_order()));
  }
  g->gamma = raise_gamma(*g, g->gamma_low);
  finish(*g, validate);
  return g;
}

Tensor3 levi_civita(const JetMatrix& metric) {
  const std::size_t n = metric.size();
  const ChartPtr& chart = metric[0][0].chart();
  const JetMatrix inv = invert_matrix(metric);
  int order = 1 << 20;
  for (const auto& row : metric) {
    for (const auto& e : row) order = std::min(order, e.valid_order());
  }
  if (order < 1) throw OrderError("metric needs valid order >= 1 for Christoffel symbols");
  // dg[l][i][j] = d_l g_{ij}
  Tensor3 dg = make_tensor3(chart, n, order - 1);
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) dg[l][i][j] = partial(metric[i][j], l);
    }
  }
  Tensor3 out = make_tensor3(chart, n, order - 1);
  const Complex half(Rational(1, 2));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        Jet s = zero(chart, order - 1);
        for (std::size_t l = 0; l < n; ++l) {
          Jet bracket = dg[i][j][l] + dg[j][i][l] - dg[l][i][j];
          if (!bracket.is_zero() && !inv[k][l].is_zero()) s += inv[k][l] * bracket;
        }
        s *= half;
        out[k][i][j] = s;
        out[k][j][i] = s;
      }
    }
  }
  return out;
}

Tensor4 curvature_from_gamma(const Tensor3& gamma) {
  const std::size_t d = gamma.size();
  const ChartPtr& chart = gamma[0][0][0].chart();
  int order = 1 << 20;
  for (const auto& a : gamma) {
    for (const auto& b : a) {
      for (const auto& c : b) order = std::min(order, c.valid_order());
    }
  }
  if (order < 1) throw OrderError("connection needs valid order >= 1 for curvature");
  Tensor4 r = make_tensor4(chart, d, order - 1);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t l = k + 1; l < d; ++l) {
          Jet s = partial(gamma[i][l][j], k) - partial(gamma[i][k][j], l);
          for (std::size_t m = 0; m < d; ++m) {
            if (!gamma[i][k][m].is_zero() && !gamma[m][l][j].is_zero()) s += gamma[i][k][m] * gamma[m][l][j];
            if (!gamma[i][l][m].is_zero() && !gamma[m][k][j].is_zero()) s -= gamma[i][l][m] * gamma[m][k][j];
          }
          r[i][j][l][k] = -s;
          r[i][j][k][l] = std::move(s);
        }
      }
    }
  }
  return r;
}

GeometryPtr lift_cotangent(const JetMatrix& metric, bool validate) {
  const std::size_t n = metric.size();
  if (n < 1 || 2 * n > kMaxVariables) throw DomainError("cotangent lift needs 1 <= n <= 4");
  for (const auto& row : metric) {
    if (row.size() != n) throw DomainError("metric is not square");
  }
  const ChartPtr& base = metric[0][0].chart();
  if (base->dim() != n) throw DomainError("metric must live on the configuration chart");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!agree(metric[i][j], metric[j][i])) throw StructureError("metric is not symmetric");
    }
  }
  if (determinant(metric).constant_term().is_zero()) throw DomainError("metric is singular at the base point");

  int morder = 1 << 20;
  for (const auto& row : metric) {
    for (const auto& e : row) morder = std::min(morder, e.valid_order());
  }
  if (morder < 2) throw OrderError("metric needs valid order >= 2 for the cotangent lift");

  auto g = std::make_shared<ChartGeometry>();
  g->kind = GeometryKind::Cotangent;
  g->n = n;
  g->order = morder - 2;
  std::vector<Complex> bp = base->base_point();
  bp.resize(2 * n, Complex(0));
  g->chart = make_chart(coordinate_names(GeometryKind::Cotangent, n), bp);
  g->base_chart = base;
  g->metric = metric;
  g->metric_inv = invert_matrix(metric);
  g->base_gamma = levi_civita(metric);
  set_darboux_omega(*g);

  const int ord = g->order;
  std::vector<std::size_t> placement;
  for (std::size_t i = 0; i < n; ++i) placement.push_back(i);
  auto lift = [&](const Jet& a) { return extend_to(a, g->chart, placement, ord).truncated(ord); };

  const Tensor3& gt = g->base_gamma;
  g->gamma = make_tensor3(g->chart, 2 * n, ord);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        const Jet v = lift(gt[k][i][j]);
        g->gamma[k][i][j] = v;                // Gamma^k_{ij}
        g->gamma[n + j][i][n + k] = -v;       // Gamma^{jb}_{i kb}
        g->gamma[n + i][n + k][j] = -v;       // Gamma^{ib}_{kb j}
      }
    }
  }
  // Gamma^{kb}_{ij} = (p_a / 3) sum_cycl(ijk) (2 Gamma~^a_{jl} Gamma~^l_{ki} - d_j Gamma~^a_{ki})
  auto bracket = [&](std::size_t a, std::size_t i, std::size_t j, std::size_t k) {
    Jet s = -partial(gt[a][k][i], j);
    for (std::size_t l = 0; l < n; ++l) s += (gt[a][j][l] * gt[l][k][i]) * Complex(2);
    return s;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        Jet total = zero(g->chart, ord);
        for (std::size_t a = 0; a < n; ++a) {
          Jet c = bracket(a, i, j, k) + bracket(a, j, k, i) + bracket(a, k, i, j);
          if (c.is_zero()) continue;
          total += lift(c) * Jet::variable(g->chart, ord, n + a);
        }
        total *= Complex(Rational(1, 3));
        g->gamma[n + k][i][j] = total.truncated(ord);
      }
    }
  }
  g->gamma_low = lower_gamma(*g, g->gamma);
  finish(*g, validate);
  return g;
}

GeometryPtr build_kaehler(const Jet& potential, bool validate) {
  const ChartPtr& chart = potential.chart();
  const std::size_t d = chart->dim();
  if (d % 2 != 0 || !chart->has_conjugation()) throw DomainError("Kaehler chart needs paired (z, zb) variables");
  const std::size_t n = d / 2;
  for (std::size_t i = 0; i < n; ++i) {
    if (chart->partner(i) != n + i) throw DomainError("Kaehler chart must list z variables before their conjugates");
  }
  if (potential.valid_order() < 3) throw OrderError("Kaehler potential needs valid order >= 3");

  auto g = std::make_shared<ChartGeometry>();
  g->kind = GeometryKind::Kaehler;
  g->n = n;
  g->order = potential.valid_order() - 3;
  g->chart = chart;
  g->potential = potential;
  const int ord = g->order;

  g->kaehler_a.assign(n, std::vector<Jet>(n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) g->kaehler_a[j][k] = partial(partial(potential, j), n + k);
  }
  try {
    g->kaehler_a_inv = invert_matrix(g->kaehler_a);
  } catch (const DomainError&) {
    throw DomainError("Kaehler metric A is degenerate at the base point");
  }
  const JetMatrix& A = g->kaehler_a;
  const JetMatrix& Ainv = g->kaehler_a_inv;

  const Complex i_unit = Complex::i();
  g->omega.assign(d, std::vector<Jet>(d, zero(chart, ord)));
  g->omega_inv.assign(d, std::vector<Jet>(d, zero(chart, ord)));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      const Jet w = (A[j][k] * i_unit).truncated(ord);
      g->omega[j][n + k] = w;
      g->omega[n + k][j] = -w;
      const Jet winv = (Ainv[k][j] * i_unit).truncated(ord);
      g->omega_inv[j][n + k] = winv;
      g->omega_inv[n + k][j] = -winv;
    }
  }

  g->gamma = make_tensor3(chart, d, ord);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      // dA[i][l] along z_j and zb_j
      for (std::size_t k = 0; k < n; ++k) {
        Jet hol = zero(chart, ord), anti = zero(chart, ord);
        for (std::size_t l = 0; l < n; ++l) {
          hol += Ainv[l][k] * partial(A[i][l], j);       // A^{lb k} d_j A_{i lb}
          anti += Ainv[k][l] * partial(A[l][i], n + j);  // A^{kb l} d_jb A_{l ib}
        }
        g->gamma[k][i][j] = hol.truncated(ord);
        g->gamma[n + k][n + i][n + j] = anti.truncated(ord);
      }
    }
  }
  g->gamma_low = lower_gamma(*g, g->gamma);
  finish(*g, validate);
  return g;
}

GeometryPtr with_gamma_low(const GeometryPtr& geom, const Tensor3& gamma_low) {
  auto g = std::make_shared<ChartGeometry>(*geom);
  g->gamma_low = gamma_low;
  g->gamma = raise_gamma(*g, gamma_low);
  return g;
}

CurvatureData curvature(const ChartGeometry& geom) {
  CurvatureData c;
  c.up = curvature_from_gamma(geom.gamma);
  const std::size_t d = geom.dim();
  c.low = make_tensor4(geom.chart, d, geom.order - 1);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t m = 0; m < d; ++m) {
      if (geom.omega[i][m].is_zero()) continue;
      for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = 0; k < d; ++k) {
          for (std::size_t l = 0; l < d; ++l) {
            if (!c.up[m][j][k][l].is_zero()) c.low[i][j][k][l] += geom.omega[i][m] * c.up[m][j][k][l];
          }
        }
      }
    }
  }
  return c;
}

bool ValidationReport::ok() const {
  for (const auto& e : entries) {
    if (!e.passed && !e.informational) return false;
  }
  return true;
}

std::string ValidationReport::str() const {
  std::ostringstream os;
  for (const auto& e : entries) {
    os << (e.passed ? "pass" : "FAIL") << "  " << e.name;
    if (e.informational) os << " (cross-check)";
    if (!e.detail.empty()) os << "  " << e.detail;
    os << "\n";
  }
  return os.str();
}

namespace {

/// Records the first index tuple at which `holds` is false.
class Checker {
 public:
  Checker(std::string name, bool informational = false) {
    entry_.name = std::move(name);
    entry_.informational = informational;
  }
  void check(bool holds, std::initializer_list<std::size_t> idx) {
    if (holds || !entry_.passed) return;
    entry_.passed = false;
    entry_.detail = "first failure at " + index_str(idx);
  }
  ValidationEntry done() { return entry_; }

 private:
  ValidationEntry entry_;
};

bool vanishes(const Jet& j) { return agree(j, Jet(j.chart(), j.valid_order())); }

bool omega_constant(const ChartGeometry& g) {
  for (const auto& row : g.omega) {
    for (const auto& e : row) {
      if (!e.is_constant()) return false;
    }
  }
  return true;
}

}  // namespace

ValidationReport validate_connection(const ChartGeometry& g) {
  ValidationReport report;
  const std::size_t d = g.dim();

  Checker anti("omega antisymmetric");
  Checker inv("omega inverse");
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      anti.check(agree(g.omega[i][j], -g.omega[j][i]), {i, j});
      Jet s = zero(g.chart, g.order);
      for (std::size_t k = 0; k < d; ++k) s += g.omega_inv[i][k] * g.omega[k][j];
      inv.check(agree(s, constant(g.chart, g.order, Complex(i == j ? 1 : 0))), {i, j});
    }
  }
  report.entries.push_back(anti.done());
  report.entries.push_back(inv.done());

  Checker torsion("torsion-free");
  Checker symp("symplectic (nabla omega = 0)");
  Checker sym("Gamma_ijk totally symmetric");
  const bool constant_omega = omega_constant(g);
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        torsion.check(agree(g.gamma[k][i][j], g.gamma[k][j][i]), {k, i, j});
        // d_k omega_{ij} - Gamma^l_{ki} omega_{lj} - Gamma^l_{kj} omega_{il}
        Jet s = g.order >= 1 ? partial(g.omega[i][j], k) : zero(g.chart, 0);
        for (std::size_t l = 0; l < d; ++l) {
          if (!g.omega[l][j].is_zero()) s -= g.gamma[l][k][i] * g.omega[l][j];
          if (!g.omega[i][l].is_zero()) s -= g.gamma[l][k][j] * g.omega[i][l];
        }
        symp.check(vanishes(s), {k, i, j});
      }
    }
  }
  for (std::size_t i = 0; constant_omega && i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        const Jet& a = g.gamma_low[i][j][k];
        sym.check(agree(a, g.gamma_low[j][i][k]) && agree(a, g.gamma_low[i][k][j]) && agree(a, g.gamma_low[k][j][i]),
                  {i, j, k});
      }
    }
  }
  report.entries.push_back(torsion.done());
  report.entries.push_back(symp.done());
  if (constant_omega) report.entries.push_back(sym.done());

  if (g.order < 1) return report;
  const CurvatureData c = curvature(g);
  Checker r_anti("R antisymmetric in the form indices");
  Checker r_sym("R_ijkl symmetric in the first two indices");
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t l = 0; l < d; ++l) {
          r_anti.check(agree(c.up[i][j][k][l], -c.up[i][j][l][k]), {i, j, k, l});
          r_sym.check(agree(c.low[i][j][k][l], c.low[j][i][k][l]), {i, j, k, l});
        }
      }
    }
  }
  report.entries.push_back(r_anti.done());
  report.entries.push_back(r_sym.done());

  const std::size_t n = g.n;
  if (g.kind == GeometryKind::Kaehler && g.order >= 1) {
    const JetMatrix& A = g.kaehler_a;
    const JetMatrix& Ainv = g.kaehler_a_inv;
    const Complex iu = Complex::i();
    Checker formula("Kaehler curvature formula");
    Checker syms("Kaehler curvature symmetries");
    Checker zeros("Kaehler curvature vanishing components");
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t l = 0; l < n; ++l) {
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            // R_{k lb i jb} = i d_i d_lb A_{k jb} - i A^{nb m} d_i A_{k nb} d_lb A_{m jb}
            Jet expect = partial(partial(A[k][j], i), n + l) * iu;
            for (std::size_t a = 0; a < n; ++a) {
              for (std::size_t m = 0; m < n; ++m) {
                expect -= Ainv[a][m] * partial(A[k][a], i) * partial(A[m][j], n + l) * iu;
              }
            }
            const Jet& r = c.low[k][n + l][i][n + j];
            formula.check(agree(r, expect), {k, n + l, i, n + j});
            syms.check(agree(r, -c.low[k][n + l][n + j][i]) && agree(r, -c.low[n + j][i][n + l][k]) &&
                           agree(r, c.low[n + j][i][k][n + l]) && agree(r, c.low[k][n + j][i][n + l]) &&
                           agree(c.low[n + k][l][n + i][j], c.low[n + k][j][n + i][l]),
                       {k, n + l, i, n + j});
          }
        }
      }
    }
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) {
        for (std::size_t e = 0; e < d; ++e) {
          for (std::size_t f = 0; f < d; ++f) {
            const bool mixed_first = (a < n) != (b < n);
            const bool mixed_last = (e < n) != (f < n);
            if (!mixed_first || !mixed_last) zeros.check(vanishes(c.low[a][b][e][f]), {a, b, e, f});
          }
        }
      }
    }
    report.entries.push_back(formula.done());
    report.entries.push_back(syms.done());
    report.entries.push_back(zeros.done());
  }

  if (g.kind == GeometryKind::Cotangent && g.order >= 1) {
    const Tensor4 rb = curvature_from_gamma(g.base_gamma);
    std::vector<std::size_t> placement;
    for (std::size_t i = 0; i < n; ++i) placement.push_back(i);
    auto lift = [&](const Jet& a) { return extend_to(a, g.chart, placement, g.order); };
    Checker base_block("lifted curvature R^l_kij = R~^l_kij", true);
    Checker bar_block("lifted curvature R^lb_kb ij = -R~^k_lij", true);
    Checker mixed("lifted curvature R^lb_k i jb = (R~^j_lki + R~^j_kli)/3", true);
    for (std::size_t l = 0; l < n; ++l) {
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            base_block.check(agree(c.up[l][k][i][j], lift(rb[l][k][i][j])), {l, k, i, j});
            bar_block.check(agree(c.up[n + k][n + l][i][j], -lift(rb[l][k][i][j])), {n + k, n + l, i, j});
            Jet expect = (lift(rb[j][l][k][i]) + lift(rb[j][k][l][i])) * Complex(Rational(1, 3));
            mixed.check(agree(c.up[n + l][k][i][n + j], expect), {n + l, k, i, n + j});
          }
        }
      }
    }
    report.entries.push_back(base_block.done());
    report.entries.push_back(bar_block.done());
    report.entries.push_back(mixed.done());
  }
  return report;
}

std::vector<Jet> hamiltonian_vf(const Jet& f, const ChartGeometry& g) {
  if (!f.chart() || f.chart()->names() != g.chart->names()) throw ChartMismatch("function lives on another chart");
  const std::size_t d = g.dim();
  std::vector<Jet> df;
  for (std::size_t b = 0; b < d; ++b) df.push_back(partial(f, b));
  std::vector<Jet> x;
  for (std::size_t a = 0; a < d; ++a) {
    Jet s(g.chart, df[0].valid_order());
    for (std::size_t b = 0; b < d; ++b) {
      if (!g.omega_inv[a][b].is_zero()) s += g.omega_inv[a][b] * df[b];
    }
    x.push_back(std::move(s));
  }
  return x;
}

Jet poisson(const Jet& f, const Jet& h, const ChartGeometry& g) {
  if (!f.chart() || f.chart()->names() != g.chart->names() || !h.chart() ||
      h.chart()->names() != g.chart->names()) {
    throw ChartMismatch("function lives on another chart");
  }
  const std::size_t d = g.dim();
  Jet s(g.chart, std::min(f.valid_order(), h.valid_order()));
  for (std::size_t a = 0; a < d; ++a) {
    const Jet fa = partial(f, a);
    for (std::size_t b = 0; b < d; ++b) {
      if (!g.omega_inv[a][b].is_zero()) s += g.omega_inv[a][b] * fa * partial(h, b);
    }
  }
  return s;
}

Jet omega_pair(const std::vector<Jet>& x, const std::vector<Jet>& y, const ChartGeometry& g) {
  const std::size_t d = g.dim();
  Jet s(g.chart, g.order);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      if (!g.omega[a][b].is_zero()) s += g.omega[a][b] * x[a] * y[b];
    }
  }
  return s;
}

JetMatrix covariant_derivative(const std::vector<Jet>& x, const ChartGeometry& g) {
  const std::size_t d = g.dim();
  JetMatrix out(d, std::vector<Jet>(d));
  for (std::size_t b = 0; b < d; ++b) {
    for (std::size_t j = 0; j < d; ++j) {
      Jet s = partial(x[b], j);
      for (std::size_t c = 0; c < d; ++c) {
        if (!g.gamma[b][j][c].is_zero()) s += g.gamma[b][j][c] * x[c];
      }
      out[b][j] = std::move(s);
    }
  }
  return out;
}

namespace {

int front_sign(std::uint16_t form, std::size_t k) {
  const unsigned below = static_cast<unsigned>(form) & ((1u << k) - 1u);
  return (__builtin_popcount(below) % 2 == 0) ? 1 : -1;
}

}  // namespace

WeylForm nabla(const WeylForm& a, const ChartGeometry& g) {
  if (a.algebra() != g.algebra) throw ChartMismatch("Weyl form belongs to a different geometry");
  WeylForm out = exterior_d(a);
  const std::size_t d = g.dim();
  for (const auto& [key, c] : a.terms()) {
    for (std::size_t i = 0; i < d; ++i) {
      const unsigned e = key.y[i];
      if (e == 0) continue;
      const Monomial rest = key.y - Monomial::unit(i);
      for (std::size_t b = 0; b < d; ++b) {
        if (key.form & (1u << b)) continue;
        const std::uint16_t form = static_cast<std::uint16_t>(key.form | (1u << b));
        const long sign = -static_cast<long>(e) * front_sign(key.form, b);
        for (std::size_t s = 0; s < d; ++s) {
          const Jet& gam = g.gamma[i][s][b];
          out.accumulate_scaled(WeylKey{key.hbar, rest + Monomial::unit(s), form}, c * gam, Complex(sign));
        }
      }
    }
  }
  int gamma_valid = WeylForm::kExact;
  for (const auto& x : g.gamma) {
    for (const auto& y : x) {
      for (const auto& z : y) gamma_valid = std::min(gamma_valid, z.valid_order());
    }
  }
  WeylForm::Floors fl = a.floors();
  for (auto& [k, f] : fl) f = std::min(f, gamma_valid);
  out.lower_floors(fl, true);
  return out;
}

WeylForm curvature_form(const ChartGeometry& g, const CurvatureData& curv, int cap2) {
  WeylForm out(g.algebra, cap2);
  const std::size_t d = g.dim();
  const Complex quarter(Rational(-1, 4));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t l = 0; l < d; ++l) {
          if (k == l) continue;
          const Jet& r = curv.low[i][j][k][l];
          // dx^k ^ dx^l in increasing order
          const std::uint16_t form = static_cast<std::uint16_t>((1u << k) | (1u << l));
          const long sign = k < l ? 1 : -1;
          out.accumulate_scaled(WeylKey{0, Monomial::unit(i) + Monomial::unit(j), form}, r, quarter * Complex(sign));
        }
      }
    }
  }
  return out;
}

WeylForm connection_form(const ChartGeometry& g, int cap2) {
  WeylForm out(g.algebra, cap2);
  const std::size_t d = g.dim();
  const Complex half(Rational(-1, 2));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        const Jet& gam = g.gamma_low[i][j][k];
        out.accumulate_scaled(WeylKey{0, Monomial::unit(i) + Monomial::unit(j), static_cast<std::uint16_t>(1u << k)},
                              gam, half);
      }
    }
  }
  return out;
}

WeylForm fiber_coordinate(const ChartGeometry& g, std::size_t i, int cap2) {
  return WeylForm::term(g.algebra, cap2, WeylKey{0, Monomial::unit(i), 0}, Jet::constant(g.chart, g.order, Complex(1)));
}

}  // namespace fedosov
