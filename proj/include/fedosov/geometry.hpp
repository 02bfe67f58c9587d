#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fedosov/jet.hpp"
#include "fedosov/weyl.hpp"

namespace fedosov {

enum class GeometryKind { Flat, Darboux, Cotangent, Kaehler };
std::string_view kind_name(GeometryKind kind);
std::optional<GeometryKind> kind_from_name(std::string_view name);

/// t[a][b][c]
using Tensor3 = std::vector<JetMatrix>;
/// t[a][b][c][d]
using Tensor4 = std::vector<Tensor3>;

Tensor3 make_tensor3(const ChartPtr& chart, std::size_t n, int order);
Tensor4 make_tensor4(const ChartPtr& chart, std::size_t n, int order);

/// A 2n-dimensional symplectic chart with a symplectic connection.
/// Coordinates are (q^1..q^n, p_1..p_n), or (z^1..z^n, zb^1..zb^n) for Kaehler charts.
struct ChartGeometry {
  GeometryKind kind = GeometryKind::Flat;
  std::size_t n = 1;
  /// Valid jet order of the connection coefficients.
  int order = 0;
  ChartPtr chart;
  JetMatrix omega;          // omega_{ab}
  JetMatrix omega_inv;      // omega^{ab}, the matrix inverse of omega_{ab}
  Tensor3 gamma;            // gamma[k][i][j] = Gamma^k_{ij}, with nabla_i e_j = Gamma^k_{ij} e_k
  Tensor3 gamma_low;        // gamma_low[i][j][k] = Gamma_{ijk} = omega_{il} Gamma^l_{jk}
  WeylAlgebraPtr algebra;

  // Cotangent source data, on the configuration chart.
  ChartPtr base_chart;
  JetMatrix metric;         // g_{ij}(q)
  JetMatrix metric_inv;     // g^{ij}(q)
  Tensor3 base_gamma;       // Levi-Civita Gamma~^k_{ij}

  // Kaehler source data, on the full chart.
  std::optional<Jet> potential;  // K
  JetMatrix kaehler_a;      // A_{j kb} as [j][k]
  JetMatrix kaehler_a_inv;  // A^{kb l} as [k][l]

  std::size_t dim() const { return 2 * n; }
  /// Indices of the first (q or z) and second (p or zb) coordinate blocks.
  std::vector<std::size_t> first_block() const;
  std::vector<std::size_t> second_block() const;
};

using GeometryPtr = std::shared_ptr<const ChartGeometry>;

/// Coordinate names: q,p (n = 1) or q1..qn, p1..pn; z,zb or z1..zn, zb1..zbn for Kaehler.
std::vector<std::string> coordinate_names(GeometryKind kind, std::size_t n);

/// R^n x R^n with omega = dp ^ dq and Gamma = 0.
GeometryPtr build_flat(std::size_t n, int order, std::vector<Complex> base_point = {});

/// Constant Darboux omega with user-supplied lowered Gamma_{ijk} (0-based index triples,
/// missing entries are zero).  Validated unless `validate` is false.
GeometryPtr build_darboux(std::size_t n, int order, const std::map<std::array<std::size_t, 3>, Jet>& gamma_low,
                          std::vector<Complex> base_point = {}, bool validate = true);

/// Levi-Civita Christoffels Gamma~^k_{ij} of a metric on the configuration chart.
Tensor3 levi_civita(const JetMatrix& metric);
/// R^i_{jkl} = d_k Gamma^i_{lj} - d_l Gamma^i_{kj} + Gamma^i_{km} Gamma^m_{lj} - Gamma^i_{lm} Gamma^m_{kj}
Tensor4 curvature_from_gamma(const Tensor3& gamma);

/// Lift of the Levi-Civita connection of g (jets on the configuration chart, base point q0)
/// to T*Q.  The metric should be supplied two orders above the desired connection order.
GeometryPtr lift_cotangent(const JetMatrix& metric, bool validate = true);

/// Kaehler chart from a potential K on a chart (z.., zb..) with conjugation pairing.
/// K should be supplied three orders above the desired connection order.
GeometryPtr build_kaehler(const Jet& potential, bool validate = true);

/// Copy of a geometry with a different connection (used for counterexamples).
GeometryPtr with_gamma_low(const GeometryPtr& geom, const Tensor3& gamma_low);

struct CurvatureData {
  Tensor4 up;   // R^i_{jkl}
  Tensor4 low;  // R_{ijkl} = omega_{im} R^m_{jkl}
};
CurvatureData curvature(const ChartGeometry& geom);

struct ValidationEntry {
  std::string name;
  bool passed = true;
  std::string detail;  // first failing component, if any
  bool informational = false;  // cross-checks that do not decide validity
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;
  bool ok() const;
  std::string str() const;
};

ValidationReport validate_connection(const ChartGeometry& geom);

/// X_f^a = omega^{ab} d_b f
std::vector<Jet> hamiltonian_vf(const Jet& f, const ChartGeometry& geom);
/// {f,g} = omega^{ab} d_a f d_b g
Jet poisson(const Jet& f, const Jet& g, const ChartGeometry& geom);
/// omega(X, Y) = omega_{ab} X^a Y^b
Jet omega_pair(const std::vector<Jet>& x, const std::vector<Jet>& y, const ChartGeometry& geom);
/// (nabla X)^b_j = d_j X^b + Gamma^b_{jc} X^c, as [b][j]
JetMatrix covariant_derivative(const std::vector<Jet>& x, const ChartGeometry& geom);

/// Exterior covariant derivative on Omega(W): d on coefficients and
/// nabla y^i = -Gamma^i_{ab} y^a dx^b, with new form factors placed on the left.
WeylForm nabla(const WeylForm& a, const ChartGeometry& geom);
/// R^ = -(1/4) R_{ijkl} y^i y^j dx^k ^ dx^l
WeylForm curvature_form(const ChartGeometry& geom, const CurvatureData& curv, int cap2);
/// dU(Gamma) written as -(i/2hbar) Gamma_{ijk} y^i y^j dx^k without the 1/hbar: returns
/// -(1/2) Gamma_{ijk} y^i y^j dx^k so that nabla = d + (i/hbar)[returned, .] on Darboux charts.
WeylForm connection_form(const ChartGeometry& geom, int cap2);

/// Weyl algebra element of the fiber coordinate y^i.
WeylForm fiber_coordinate(const ChartGeometry& geom, std::size_t i, int cap2);

}  // namespace fedosov
