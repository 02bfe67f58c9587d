#include "fedosov/fedosov.hpp"

#include <sstream>

#include "fedosov/error.hpp"

namespace fedosov {

namespace {

bool vanishes(const Jet& j) { return agree(j, Jet(j.chart(), j.valid_order())); }

/// (i/hbar) a o a for an odd form, or (i/hbar)[a, b] in general, computed at cap2 + 1
/// so that the result is complete through cap2 - 1.
WeylForm i_over_hbar_odd(const WeylForm& a, const WeylForm& b, int cap2, bool commutator) {
  WeylForm prod = weyl_mul_parity(a.with_cap(cap2 + 1), b.with_cap(cap2 + 1), ContractionParity::Odd);
  if (commutator) prod *= Complex(2);
  return divide_hbar(prod) * Complex::i();
}

/// r -> delta^-1 R^ + delta^-1(nabla r + (i/hbar) r^2)
WeylForm fedosov_map(const WeylForm& r, const FedosovState& s) {
  const int cap = s.degree_cap;
  WeylForm rhs = s.curvature + nabla(r, *s.geometry) + i_over_hbar_odd(r, r, cap, false).with_cap(cap);
  return op_delta_inv(rhs);
}

WeylForm flatness_residual(const FedosovState& s) {
  const int cap = s.degree_cap;
  WeylForm rhs = s.curvature + nabla(s.r, *s.geometry) + i_over_hbar_odd(s.r, s.r, cap, false).with_cap(cap);
  return (op_delta(s.r) - rhs).with_cap(cap - 1);
}

void require_usable(const FedosovState& s, const Jet& f) {
  if (!s.geometry || !s.converged) throw StateError("Fedosov state has not converged");
  if (!same_chart(f.chart(), s.geometry->chart)) throw ChartMismatch("function and Fedosov state live on different charts");
  const int need = required_geometry_order(s.target_order);
  if (f.valid_order() < need) {
    throw OrderError("function jet valid to order " + std::to_string(f.valid_order()) + ", need " +
                     std::to_string(need) + " for hbar^" + std::to_string(s.target_order));
  }
}

}  // namespace

int required_geometry_order(int target_order) { return 2 * target_order + 3; }

FedosovState solve_r(const GeometryPtr& geom, int target_order) {
  if (!geom) throw StructureError("solve_r: no geometry");
  if (target_order < 0) throw DomainError("solve_r: negative target order");
  const int need = required_geometry_order(target_order);
  if (geom->order < need) {
    throw OrderError("geometry jets valid to order " + std::to_string(geom->order) + ", need " + std::to_string(need) +
                     " for hbar^" + std::to_string(target_order));
  }
  FedosovState s;
  s.geometry = geom;
  s.target_order = target_order;
  s.degree_cap = 2 * target_order + 1;
  s.curvature = curvature_form(*geom, curvature(*geom), s.degree_cap);
  s.r = WeylForm(geom->algebra, s.degree_cap);

  // The degree-d part of r only reads degrees below d, so each component is produced
  // once and its contributions to higher degrees are pushed forward.
  const int cap = s.degree_cap;
  WeylForm pending = op_delta_inv(s.curvature);
  WeylForm lower(geom->algebra, cap);
  for (int d = 0; d <= cap; ++d) {
    const WeylForm rd = project(pending, GradedProjection::hbar_degree2(d));
    if (d < cap) {
      WeylForm image = nabla(rd, *geom);
      if (!rd.terms().empty() || !rd.floors().empty()) {
        image += i_over_hbar_odd(rd, rd, cap, false).with_cap(cap);
        image += i_over_hbar_odd(lower, rd, cap, true).with_cap(cap);
      }
      pending += op_delta_inv(image);
    }
    lower += rd;
    s.iterations_used = d + 1;
  }
  s.r = lower;
  if (!agree(fedosov_map(s.r, s), s.r)) throw Error("solve_r: result is not a fixed point");
  s.converged = true;
  s.residual = flatness_residual(s);
  return s;
}

FedosovState with_target_order(const FedosovState& s, int target_order) {
  if (target_order > s.target_order) throw StateError("cannot raise the target order of a solved state");
  if (target_order < 0) throw DomainError("negative target order");
  FedosovState out = s;
  out.target_order = target_order;
  out.degree_cap = 2 * target_order + 1;
  out.curvature = s.curvature.with_cap(out.degree_cap);
  out.r = s.r.with_cap(out.degree_cap);
  out.residual = s.residual.with_cap(out.degree_cap - 1);
  return out;
}

WeylForm flat_section(const Jet& f, const FedosovState& s) {
  require_usable(s, f);
  const int cap = s.degree_cap;
  // F = f + delta^-1(nabla F + (i/hbar)[r, F]) is affine in F and its degree-d part only
  // reads degrees below d, so each component goes through the map once.
  WeylForm F(s.geometry->algebra, cap);
  WeylForm pending = WeylForm::scalar(s.geometry->algebra, cap, f);
  for (int d = 0; d <= cap; ++d) {
    const WeylForm Fd = project(pending, GradedProjection::hbar_degree2(d));
    if (d < cap) {
      WeylForm image = nabla(Fd, *s.geometry);
      if (d > 0) image += i_over_hbar_odd(s.r, Fd, cap, true).with_cap(cap);
      pending += op_delta_inv(image);
    }
    F += Fd;
  }
  return F;
}

WeylForm flat_section_residual(const WeylForm& fhat, const FedosovState& s) {
  const int cap = s.degree_cap;
  WeylForm lhs = nabla(fhat, *s.geometry) + i_over_hbar_odd(s.r, fhat, cap, true).with_cap(cap);
  return (lhs - op_delta(fhat)).with_cap(cap - 1);
}

StarSeries star_sections(const WeylForm& fhat, const WeylForm& ghat, const FedosovState& s) {
  const int top = 2 * s.target_order;
  WeylForm prod = project(weyl_mul(fhat.with_cap(top), ghat.with_cap(top)), GradedProjection::scalar());
  HbarSeries sym = symbol(prod);
  StarSeries out;
  out.valid_hbar_order = s.target_order;
  const ChartPtr& chart = s.geometry->chart;
  const int order = std::min(fhat.valid_order(), ghat.valid_order());
  for (int k = 0; k <= s.target_order; ++k) {
    if (static_cast<std::size_t>(k) < sym.size()) {
      out.coefficients.push_back(sym[k]);
    } else {
      out.coefficients.emplace_back(chart, order);
    }
  }
  return out;
}

StarSeries star(const Jet& f, const Jet& g, const FedosovState& s) {
  require_usable(s, g);
  return star_sections(flat_section(f, s), flat_section(g, s), s);
}

StarSeries moyal_reference(const Jet& f, const Jet& g, std::size_t n, int target_order) {
  if (!same_chart(f.chart(), g.chart())) throw ChartMismatch("moyal_reference: charts differ");
  if (f.nvars() != 2 * n) {
    throw StructureError("moyal_reference needs a flat chart with " + std::to_string(2 * n) + " coordinates");
  }
  if (target_order < 0) throw DomainError("moyal_reference: negative target order");
  StarSeries out;
  out.valid_hbar_order = target_order;
  // Terms of P^k(f (x) g), P = sum_i d_qi (x) d_pi - d_pi (x) d_qi, kept as (left, right, sign).
  struct Pair {
    Jet left, right;
    int sign;
  };
  std::vector<Pair> level{{f, g, 1}};
  Complex factor(1);
  const Complex half_i(Rational(0), Rational(1, 2));
  for (int k = 0; k <= target_order; ++k) {
    Jet sum(f.chart(), std::min(f.valid_order(), g.valid_order()) - k);
    for (const auto& p : level) sum.add_scaled(p.left * p.right, Complex(p.sign));
    out.coefficients.push_back(sum * factor);
    if (k == target_order) break;
    std::vector<Pair> next;
    for (const auto& p : level) {
      for (std::size_t i = 0; i < n; ++i) {
        next.push_back({partial(p.left, i), partial(p.right, n + i), p.sign});
        next.push_back({partial(p.left, n + i), partial(p.right, i), -p.sign});
      }
    }
    level = std::move(next);
    factor *= half_i;
    factor *= Complex(Rational(1, k + 1));
  }
  return out;
}

bool agree(const StarSeries& a, const StarSeries& b) {
  const int top = std::min(a.valid_hbar_order, b.valid_hbar_order);
  for (int k = 0; k <= top; ++k) {
    if (!agree(a.coefficients.at(k), b.coefficients.at(k))) return false;
  }
  return true;
}

std::string StarSeries::str() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    os << "hbar^" << k << ": " << coefficients[k].str() << "\n";
  }
  return os.str();
}

std::vector<std::size_t> nonzero_by_degree(const WeylForm& a) {
  std::vector<std::size_t> out(static_cast<std::size_t>(std::max(a.cap2(), 0)) + 1, 0);
  for (const auto& [k, c] : a.terms()) {
    if (!vanishes(c)) ++out[static_cast<std::size_t>(k.degree2())];
  }
  return out;
}

FlatnessReport check_flatness(const FedosovState& s) {
  FlatnessReport rep;
  if (!s.geometry) return rep;
  auto add = [&](const std::string& eq, const WeylForm& a) {
    const auto counts = nonzero_by_degree(a);
    for (std::size_t d = 0; d < counts.size(); ++d) {
      if (counts[d] > 0) rep.lines.push_back({eq, static_cast<int>(d), counts[d]});
    }
  };
  add("flatness", flatness_residual(s));
  add("delta^-1 r", op_delta_inv(s.r));
  WeylForm scalar_part(s.r.algebra(), s.r.cap2());
  for (const auto& [k, c] : s.r.terms()) {
    if (k.y == Monomial()) scalar_part.accumulate(k, c);
  }
  add("scalar part", scalar_part);
  return rep;
}

std::string FlatnessReport::str() const {
  if (lines.empty()) return "flat: no residual on retained degrees\n";
  std::ostringstream os;
  for (const auto& l : lines) {
    os << l.equation << " residual at degree " << l.degree2 << "/2: " << l.nonzero << " nonzero coefficient(s)\n";
  }
  return os.str();
}

}  // namespace fedosov
