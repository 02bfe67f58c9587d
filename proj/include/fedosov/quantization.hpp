#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fedosov/diffop.hpp"
#include "fedosov/fedosov.hpp"
#include "fedosov/geometry.hpp"

namespace fedosov {

/// Configuration chart carrying wave functions: q-block for flat/cotangent, z-block for Kaehler.
ChartPtr configuration_chart(const ChartGeometry& geom);
/// Embeds a configuration-chart jet into the phase-space chart.
Jet lift_to_phase_space(const Jet& psi, const ChartGeometry& geom);

/// f = a^i(q) p_i + b(q) on a cotangent (or flat) chart.
struct AffineObservable {
  std::vector<Jet> a;  // on the configuration chart
  Jet b;
};
AffineObservable split_affine_cotangent(const Jet& f, const ChartGeometry& geom);

/// rho(f) = -i hbar (a^j d_j + (1/2) div a) + b, div a = g^{-1/2} d_j (g^{1/2} a^j).
DiffOp gq_cotangent(const Jet& f, const ChartGeometry& geom);

/// f = u^a(z) d_a K + v(z) on a Kaehler chart.
struct KaehlerAffine {
  std::vector<Jet> u;  // on the configuration chart
  Jet v;
};
KaehlerAffine split_affine_kaehler(const Jet& f, const ChartGeometry& geom);

/// rho(u^a d_a K + v) = hbar (u^a d_a + (1/2) d_a u^a) + v.
DiffOp gq_kaehler(const Jet& f, const ChartGeometry& geom);

enum class Factorization {
  AffineLeft,   // p_i * (rest)
  AffineRight,  // (rest) * p_i
  CoefficientLeft,  // (c p_i) * p^(alpha - e_i)
};
std::string_view factorization_name(Factorization f);

/// rho(f) for f polynomial in the momenta, by solving rho(u)rho(v) = rho(u * v) recursively.
DiffOp rho_extend(const Jet& f, const FedosovState& state, Factorization strategy = Factorization::AffineLeft);

struct RhoResult {
  DiffOp op;
  bool consistent = true;
  std::string detail;  // first disagreeing factorization, if any
};
/// rho_extend under every factorization strategy and every choice of split momentum;
/// throws StructureError on disagreement unless `throw_on_mismatch` is false.
RhoResult rho_extend_checked(const Jet& f, const FedosovState& state, bool throw_on_mismatch = true);

/// Laplace-Beltrami operator g^{-1/2} d_a g^{1/2} g^{ab} d_b of a metric.
DiffOp laplace_beltrami(const JetMatrix& metric);
/// Scalar curvature g^{jl} R^i_{jil}.
Jet scalar_curvature(const JetMatrix& metric);
/// g^{ab}(q) p_a p_b on the phase-space chart.
Jet kinetic_observable(const ChartGeometry& geom);

struct KineticResult {
  std::optional<Rational> alpha;  // empty when the scalar curvature vanishes
  bool pure_multiplication = false;
  DiffOp rho;       // rho(g^{ab} p_a p_b)
  DiffOp residual;  // rho + hbar^2 Delta
  std::string detail;
};
/// Compares rho(g^{ab} p_a p_b) with -hbar^2 Delta + alpha hbar^2 R.
KineticResult kinetic_alpha(const FedosovState& state);

struct CompatCheck {
  std::string name;
  int orders = 0;  // hbar powers tested: 0..orders
  bool passed = true;
  std::string location;  // first offending sample / hbar power / coefficient
  bool informational = false;
};

struct CompatReport {
  std::vector<CompatCheck> checks;
  std::vector<std::string> notes;  // audit values
  bool ok() const;
  std::string str() const;
  void add(CompatCheck c);
};

/// f*g = fg (polarized f, g) and f*h = fh + (i hbar/2){f,h}, h*f = hf + (i hbar/2){h,f}
/// for h affine in p, through hbar^N on `samples` random pairs.
CompatReport check_kompi(const FedosovState& state, int samples, std::uint64_t seed);

/// H = p d/dp + hbar d/dhbar is a derivation of * through hbar^N.
CompatReport check_homogeneity(const FedosovState& state, int samples, std::uint64_t seed);

/// Vanishing of the hbar^2, hbar^3 coefficients of (w_a z^a) * (-i d_m K), the individual
/// hbar^3 contributions, and f*g = fg for holomorphic pairs.
CompatReport check_kaehler_orders(const FedosovState& state, int samples, std::uint64_t seed);

/// Schroedinger and Fock representations as Moyal *-homomorphisms through hbar^N.
CompatReport flat_reps(std::size_t n, int target_order);

/// Constant-coefficient Moyal product exp((i hbar/2) pi^{ab} d_a (x) d_b).
StarSeries moyal_general(const Jet& f, const Jet& g, const std::vector<std::vector<Complex>>& pi, int target_order);

/// Weyl-symmetrized operator of a polynomial whose variables map to the given generator operators.
DiffOp weyl_ordered(const Jet& poly, const std::vector<DiffOp>& generators, const ChartPtr& target);

}  // namespace fedosov
