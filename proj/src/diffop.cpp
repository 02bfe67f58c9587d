#include "fedosov/diffop.hpp"

#include <sstream>

#include "fedosov/error.hpp"

namespace fedosov {

namespace {

Jet derivative_of(Jet f, Monomial alpha, std::size_t nvars) {
  for (std::size_t v = 0; v < nvars; ++v) {
    for (unsigned e = 0; e < alpha[v]; ++e) f = partial(f, v);
  }
  return f;
}

Rational binomial(unsigned n, unsigned k) {
  Rational r(1);
  for (unsigned i = 0; i < k; ++i) r = r * Rational(n - i) / Rational(i + 1);
  return r;
}

/// Calls fn(gamma) for every gamma <= alpha.
template <typename Fn>
void for_each_below(Monomial alpha, std::size_t nvars, Fn&& fn) {
  std::vector<unsigned> cur(nvars, 0);
  while (true) {
    Monomial g;
    for (std::size_t v = 0; v < nvars; ++v) g = g.with(v, cur[v]);
    fn(g);
    std::size_t v = 0;
    while (v < nvars && cur[v] == alpha[v]) cur[v++] = 0;
    if (v == nvars) return;
    ++cur[v];
  }
}

std::string multi_index_str(Monomial alpha, const Chart& chart) {
  if (alpha == Monomial()) return "1";
  std::string s;
  for (std::size_t v = 0; v < chart.dim(); ++v) {
    for (unsigned e = 0; e < alpha[v]; ++e) s += (s.empty() ? "d_" : " d_") + chart.name(v);
  }
  return s;
}

}  // namespace

DiffOp DiffOp::identity(const ChartPtr& chart, int order) {
  return multiplication(Jet::constant(chart, order, Complex(1)));
}

DiffOp DiffOp::multiplication(const Jet& f) {
  DiffOp out(f.chart());
  out.add(Monomial(), 0, f);
  return out;
}

DiffOp DiffOp::derivative(const ChartPtr& chart, std::size_t var, int order) {
  DiffOp out(chart);
  out.add(Monomial::unit(var), 0, Jet::constant(chart, order, Complex(1)));
  return out;
}

int DiffOp::max_hbar() const {
  int m = -1;
  for (const auto& [alpha, cs] : terms_) m = std::max(m, static_cast<int>(cs.size()) - 1);
  return m;
}

int DiffOp::derivative_order() const {
  int m = -1;
  for (const auto& [alpha, cs] : terms_) m = std::max(m, static_cast<int>(alpha.degree()));
  return m;
}

Jet DiffOp::coeff(Monomial alpha, int k, int order) const {
  auto it = terms_.find(alpha);
  if (it == terms_.end() || k < 0 || static_cast<std::size_t>(k) >= it->second.size()) return Jet(chart_, order);
  return it->second[static_cast<std::size_t>(k)];
}

void DiffOp::add(Monomial alpha, int k, const Jet& c) {
  if (!chart_) chart_ = c.chart();
  if (!same_chart(chart_, c.chart())) throw ChartMismatch("operator coefficient on a different chart");
  auto& cs = terms_[alpha];
  const auto idx = static_cast<std::size_t>(k);
  while (cs.size() <= idx) cs.emplace_back(chart_, c.valid_order());
  cs[idx] += c;
  prune();
}

void DiffOp::prune() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    auto& cs = it->second;
    while (!cs.empty() && cs.back().is_zero()) cs.pop_back();
    it = cs.empty() ? terms_.erase(it) : std::next(it);
  }
}

void DiffOp::check_chart(const DiffOp& o) const {
  if (chart_ && o.chart_ && !same_chart(chart_, o.chart_)) throw ChartMismatch("operators act on different charts");
}

DiffOp& DiffOp::operator+=(const DiffOp& o) {
  check_chart(o);
  for (const auto& [alpha, cs] : o.terms_) {
    for (std::size_t k = 0; k < cs.size(); ++k) add(alpha, static_cast<int>(k), cs[k]);
  }
  return *this;
}

DiffOp& DiffOp::operator-=(const DiffOp& o) { return *this += o * Complex(-1); }

DiffOp& DiffOp::operator*=(const Complex& c) {
  for (auto& [alpha, cs] : terms_) {
    for (auto& j : cs) j *= c;
  }
  prune();
  return *this;
}

DiffOp DiffOp::shift_hbar(int k) const {
  DiffOp out(chart_);
  for (const auto& [alpha, cs] : terms_) {
    for (std::size_t i = 0; i < cs.size(); ++i) out.add(alpha, static_cast<int>(i) + k, cs[i]);
  }
  return out;
}

DiffOp DiffOp::truncated_hbar(int k) const {
  DiffOp out(chart_);
  for (const auto& [alpha, cs] : terms_) {
    for (std::size_t i = 0; i < cs.size() && static_cast<int>(i) <= k; ++i) out.add(alpha, static_cast<int>(i), cs[i]);
  }
  return out;
}

std::string DiffOp::str() const {
  if (terms_.empty()) return "0\n";
  std::ostringstream os;
  for (const auto& [alpha, cs] : terms_) {
    for (std::size_t k = 0; k < cs.size(); ++k) {
      if (cs[k].is_zero()) continue;
      os << "hbar^" << k << " " << multi_index_str(alpha, *chart_) << ": " << cs[k].str() << "\n";
    }
  }
  return os.str();
}

HbarSeries diffop_apply(const DiffOp& a, const Jet& psi) {
  if (a.chart() && !same_chart(a.chart(), psi.chart())) throw ChartMismatch("wave function on a different chart");
  const int dorder = a.derivative_order();
  if (dorder > psi.valid_order()) {
    throw OrderError("wave function valid to order " + std::to_string(psi.valid_order()) + ", operator has order " +
                     std::to_string(dorder));
  }
  HbarSeries out;
  for (const auto& [alpha, cs] : a.terms()) {
    const Jet d = derivative_of(psi, alpha, psi.nvars());
    for (std::size_t k = 0; k < cs.size(); ++k) {
      while (out.coeffs.size() <= k) out.coeffs.emplace_back(psi.chart(), psi.valid_order());
      out.coeffs[k] += cs[k] * d;
    }
  }
  if (out.coeffs.empty()) out.coeffs.emplace_back(psi.chart(), psi.valid_order());
  return out;
}

DiffOp diffop_compose(const DiffOp& a, const DiffOp& b) {
  if (a.chart() && b.chart() && !same_chart(a.chart(), b.chart())) throw ChartMismatch("operators act on different charts");
  DiffOp out(a.chart() ? a.chart() : b.chart());
  if (!out.chart()) return out;
  const std::size_t nv = out.chart()->dim();
  for (const auto& [alpha, ac] : a.terms()) {
    for (const auto& [beta, bc] : b.terms()) {
      for_each_below(alpha, nv, [&](Monomial gamma) {
        Rational mult(1);
        for (std::size_t v = 0; v < nv; ++v) mult *= binomial(alpha[v], gamma[v]);
        const Monomial shape = (alpha - gamma) + beta;
        for (std::size_t j = 0; j < bc.size(); ++j) {
          const Jet db = derivative_of(bc[j], gamma, nv);
          if (db.is_zero()) continue;
          for (std::size_t i = 0; i < ac.size(); ++i) {
            Jet c = ac[i] * db;
            c.scale(mult);
            out.add(shape, static_cast<int>(i + j), c);
          }
        }
      });
    }
  }
  return out;
}

DiffOp diffop_commutator(const DiffOp& a, const DiffOp& b) { return diffop_compose(a, b) - diffop_compose(b, a); }

bool agree(const DiffOp& a, const DiffOp& b) {
  auto covered = [](const DiffOp& x, const DiffOp& y) {
    for (const auto& [alpha, cs] : x.terms()) {
      for (std::size_t k = 0; k < cs.size(); ++k) {
        const Jet other = y.coeff(alpha, static_cast<int>(k), cs[k].valid_order());
        if (!agree(cs[k], other)) return false;
      }
    }
    return true;
  };
  return covered(a, b) && covered(b, a);
}

}  // namespace fedosov
