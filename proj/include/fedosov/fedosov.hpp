#pragma once

#include <string>
#include <vector>

#include "fedosov/error.hpp"
#include "fedosov/geometry.hpp"
#include "fedosov/weyl.hpp"

namespace fedosov {

/// Raised when a Fedosov state cannot be used: unconverged, or built for a lower target order.
class StateError : public Error {
 public:
  using Error::Error;
};

struct FedosovState {
  GeometryPtr geometry;
  int target_order = 0;  // N: star products are certified through hbar^N
  int degree_cap = 0;    // 2N + 1, in units of half hbar-degrees
  WeylForm curvature;    // R^
  WeylForm r;
  WeylForm residual;     // delta r - (R^ + nabla r + (i/hbar) r^2) on the checkable degrees
  bool converged = false;
  int iterations_used = 0;
};

/// Coefficients of f*g, index = hbar power, certified through valid_hbar_order.
struct StarSeries {
  std::vector<Jet> coefficients;
  int valid_hbar_order = 0;

  const Jet& operator[](std::size_t k) const { return coefficients[k]; }
  std::string str() const;
};

/// Minimum jet order a geometry needs for target order N.
int required_geometry_order(int target_order);

/// Solves delta r = R^ + nabla r + (i/hbar) r^2 with delta^-1 r = 0 through degree 2N+1.
FedosovState solve_r(const GeometryPtr& geom, int target_order);

/// The same solution viewed at a lower target order (components above 2N+1 dropped).
FedosovState with_target_order(const FedosovState& state, int target_order);

/// Flat section f^ = f + delta^-1(nabla f^ + (i/hbar)[r, f^]) through the state's cap.
WeylForm flat_section(const Jet& f, const FedosovState& state);

/// D f^ = nabla f^ + (i/hbar)[r, f^] - delta f^ on the checkable degrees.
WeylForm flat_section_residual(const WeylForm& fhat, const FedosovState& state);

/// f*g = pi_0(f^ o g^) through hbar^N.
StarSeries star(const Jet& f, const Jet& g, const FedosovState& state);
/// Same product from precomputed flat sections.
StarSeries star_sections(const WeylForm& fhat, const WeylForm& ghat, const FedosovState& state);

/// Moyal product on a flat chart (q1..qn, p1..pn) by direct expansion of
/// exp((i hbar/2) omega^{ab} d_a (x) d_b), with omega^{q_i p_i} = 1.
StarSeries moyal_reference(const Jet& f, const Jet& g, std::size_t n, int target_order);

/// Componentwise comparison through the lower of the two certified hbar orders.
bool agree(const StarSeries& a, const StarSeries& b);

struct ResidualLine {
  std::string equation;  // "flatness", "delta^-1 r", "scalar part"
  int degree2 = 0;
  std::size_t nonzero = 0;
};

struct FlatnessReport {
  std::vector<ResidualLine> lines;
  bool empty() const { return lines.empty(); }
  std::string str() const;
};

/// Recomputes the residuals of the state's r; one line per offending degree.
FlatnessReport check_flatness(const FedosovState& state);

/// Number of coefficients of `a` that do not vanish through their valid order, per degree2.
std::vector<std::size_t> nonzero_by_degree(const WeylForm& a);

}  // namespace fedosov
