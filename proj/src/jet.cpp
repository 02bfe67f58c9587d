#include "fedosov/jet.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "fedosov/error.hpp"

namespace fedosov {

bool Monomial::divides(Monomial other, std::size_t nvars) const {
  for (std::size_t v = 0; v < nvars; ++v) {
    if ((*this)[v] > other[v]) return false;
  }
  return true;
}

Chart::Chart(std::vector<std::string> names, std::vector<Complex> base_point,
             std::vector<int> conjugate_partner)
    : names_(std::move(names)), base_(std::move(base_point)), partner_(std::move(conjugate_partner)) {
  if (names_.empty() || names_.size() > kMaxVariables) {
    throw DomainError("chart dimension must be between 1 and " + std::to_string(kMaxVariables));
  }
  if (base_.size() != names_.size()) throw DomainError("base point length differs from chart dimension");
  if (!partner_.empty()) {
    if (partner_.size() != names_.size()) throw DomainError("conjugation pairing has wrong length");
    for (std::size_t i = 0; i < partner_.size(); ++i) {
      const auto j = static_cast<std::size_t>(partner_[i]);
      if (partner_[i] < 0 || j >= names_.size() || static_cast<std::size_t>(partner_[j]) != i) {
        throw DomainError("conjugation pairing is not an involution");
      }
      if (base_[j] != base_[i].conj()) {
        throw DomainError("base point of conjugate variables must be complex conjugates");
      }
    }
  }
}

std::optional<std::size_t> Chart::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

ChartPtr make_chart(std::vector<std::string> names, std::vector<Complex> base_point,
                    std::vector<int> conjugate_partner) {
  return std::make_shared<const Chart>(std::move(names), std::move(base_point),
                                       std::move(conjugate_partner));
}

bool same_chart(const ChartPtr& a, const ChartPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->names() == b->names() && a->base_point() == b->base_point();
}

namespace {

/// Sparse accumulator keyed by monomial; reused across calls on one thread.
class Accumulator {
 public:
  void add_product(Monomial m, const Complex& a, const Complex& b) { slot(m).add_product(a, b); }
  void add_scaled(Monomial m, const Complex& a, const Rational& r) { slot(m).add_scaled(a, r); }
  void add(Monomial m, const Complex& a) { slot(m) += a; }

  std::vector<Jet::Term> take() {
    std::vector<Jet::Term> out;
    out.reserve(used_);
    for (std::size_t s = 0; s < used_; ++s) {
      if (!values_[s].is_zero()) out.emplace_back(keys_[s], std::move(values_[s]));
      values_[s] = Complex();
    }
    index_.clear();
    used_ = 0;
    std::sort(out.begin(), out.end(), [](const Jet::Term& x, const Jet::Term& y) { return x.first < y.first; });
    return out;
  }

 private:
  Complex& slot(Monomial m) {
    auto [it, inserted] = index_.try_emplace(m.bits(), used_);
    if (inserted) {
      if (used_ == values_.size()) {
        values_.emplace_back();
        keys_.emplace_back();
      }
      keys_[used_] = m;
      ++used_;
    }
    return values_[it->second];
  }

  std::unordered_map<std::uint64_t, std::size_t> index_;
  std::vector<Complex> values_;
  std::vector<Monomial> keys_;
  std::size_t used_ = 0;
};

Accumulator& accumulator() {
  thread_local Accumulator acc;
  return acc;
}

void sort_terms(std::vector<Jet::Term>& terms) {
  std::sort(terms.begin(), terms.end(), [](const Jet::Term& x, const Jet::Term& y) { return x.first < y.first; });
}

}  // namespace

class JetBuilder {
 public:
  static Jet make(ChartPtr chart, int max_order, int valid, std::vector<Jet::Term> terms) {
    Jet j;
    j.chart_ = std::move(chart);
    j.max_order_ = max_order;
    j.valid_order_ = valid;
    j.terms_ = std::move(terms);
    return j;
  }
};

Jet::Jet(ChartPtr chart, int order) : chart_(std::move(chart)), max_order_(order), valid_order_(order) {
  if (order < 0) throw OrderError("jet order must be non-negative");
}

Jet Jet::constant(ChartPtr chart, int order, Complex value) {
  Jet j(std::move(chart), order);
  if (!value.is_zero()) j.terms_.emplace_back(Monomial(), std::move(value));
  return j;
}

Jet Jet::variable(ChartPtr chart, int order, std::size_t i) {
  if (i >= chart->dim()) throw DomainError("variable index out of range");
  Jet j(chart, order);
  if (!chart->base(i).is_zero()) j.terms_.emplace_back(Monomial(), chart->base(i));
  if (order >= 1) j.terms_.emplace_back(Monomial::unit(i), Complex(1));
  return j;
}

Jet Jet::monomial(ChartPtr chart, int order, Monomial m, Complex coeff) {
  Jet j(std::move(chart), order);
  if (static_cast<int>(m.degree()) <= order && !coeff.is_zero()) j.terms_.emplace_back(m, std::move(coeff));
  return j;
}

Jet Jet::from_terms(ChartPtr chart, int order, std::vector<Term> terms) {
  Accumulator& acc = accumulator();
  for (auto& [m, c] : terms) {
    if (static_cast<int>(m.degree()) <= order) acc.add(m, c);
  }
  return JetBuilder::make(std::move(chart), order, order, acc.take());
}

bool Jet::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first.degree() == 0); }

Complex Jet::coeff(Monomial m) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const Term& t, Monomial key) { return t.first < key; });
  if (it != terms_.end() && it->first == m) return it->second;
  return Complex();
}

Jet Jet::truncated(int order) const {
  Jet out = *this;
  if (order >= valid_order_) return out;
  if (order < 0) throw OrderError("cannot truncate below order 0");
  out.valid_order_ = order;
  while (!out.terms_.empty() && static_cast<int>(out.terms_.back().first.degree()) > order) out.terms_.pop_back();
  return out;
}

void Jet::check_same_chart(const Jet& o) const {
  if (!same_chart(chart_, o.chart_)) throw ChartMismatch("jets live on different charts");
}

Jet Jet::operator-() const {
  Jet out = *this;
  for (auto& t : out.terms_) t.second = -t.second;
  return out;
}

Jet& Jet::operator+=(const Jet& o) {
  add_scaled(o, Rational(1));
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  add_scaled(o, Rational(-1));
  return *this;
}

Jet& Jet::operator*=(const Complex& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.second *= c;
  return *this;
}

Jet& Jet::scale(const Rational& r) {
  if (sgn(r) == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) {
    t.second.re() *= r;
    t.second.im() *= r;
  }
  return *this;
}

namespace {

template <class Combine>
void merge_into(std::vector<Jet::Term>& dst, const std::vector<Jet::Term>& src, int valid, Combine combine) {
  std::vector<Jet::Term> out;
  out.reserve(dst.size() + src.size());
  auto a = dst.begin();
  auto b = src.begin();
  auto in_range = [valid](const Jet::Term& t) { return static_cast<int>(t.first.degree()) <= valid; };
  while (a != dst.end() || b != src.end()) {
    if (b == src.end() || (a != dst.end() && a->first < b->first)) {
      if (in_range(*a)) out.push_back(std::move(*a));
      ++a;
    } else if (a == dst.end() || b->first < a->first) {
      if (in_range(*b)) {
        Complex c;
        combine(c, b->second);
        if (!c.is_zero()) out.emplace_back(b->first, std::move(c));
      }
      ++b;
    } else {
      if (in_range(*a)) {
        combine(a->second, b->second);
        if (!a->second.is_zero()) out.push_back(std::move(*a));
      }
      ++a;
      ++b;
    }
  }
  dst = std::move(out);
}

}  // namespace

void Jet::add_scaled(const Jet& o, const Complex& c) {
  if (!chart_) {
    *this = o * c;
    return;
  }
  check_same_chart(o);
  valid_order_ = std::min(valid_order_, o.valid_order_);
  max_order_ = std::max(max_order_, o.max_order_);
  if (c.is_zero()) {
    *this = truncated(valid_order_);
    return;
  }
  merge_into(terms_, o.terms_, valid_order_, [&c](Complex& dst, const Complex& src) { dst.add_product(src, c); });
}

void Jet::add_scaled(const Jet& o, const Rational& r) {
  if (!chart_) {
    *this = o;
    scale(r);
    return;
  }
  check_same_chart(o);
  valid_order_ = std::min(valid_order_, o.valid_order_);
  max_order_ = std::max(max_order_, o.max_order_);
  if (sgn(r) == 0) {
    *this = truncated(valid_order_);
    return;
  }
  if (r == 1) {
    merge_into(terms_, o.terms_, valid_order_, [](Complex& dst, const Complex& src) { dst += src; });
  } else {
    merge_into(terms_, o.terms_, valid_order_, [&r](Complex& dst, const Complex& src) { dst.add_scaled(src, r); });
  }
}

Jet operator*(const Jet& a, const Jet& b) {
  a.check_same_chart(b);
  const int valid = std::min(a.valid_order_, b.valid_order_);
  const int max_order = std::max(a.max_order_, b.max_order_);
  if (a.terms_.empty() || b.terms_.empty()) return JetBuilder::make(a.chart_, max_order, valid, {});
  if (a.is_constant() || b.is_constant()) {
    const Jet& c = a.is_constant() ? a : b;
    Jet out = (a.is_constant() ? b : a).truncated(valid);
    out.max_order_ = max_order;
    out *= c.terms_[0].second;
    return out;
  }
  Accumulator& acc = accumulator();
  for (const auto& [ma, ca] : a.terms_) {
    const int da = static_cast<int>(ma.degree());
    if (da > valid) break;
    for (const auto& [mb, cb] : b.terms_) {
      if (da + static_cast<int>(mb.degree()) > valid) break;
      acc.add_product(ma + mb, ca, cb);
    }
  }
  return JetBuilder::make(a.chart_, max_order, valid, acc.take());
}

bool operator==(const Jet& a, const Jet& b) {
  return a.valid_order_ == b.valid_order_ && same_chart(a.chart_, b.chart_) && a.terms_ == b.terms_;
}

bool agree(const Jet& a, const Jet& b, std::optional<int> order) {
  int v = std::min(a.valid_order(), b.valid_order());
  if (order) v = std::min(v, *order);
  if (v < 0) return true;
  return a.truncated(v).terms() == b.truncated(v).terms();
}

Jet add(const Jet& a, const Jet& b) { return a + b; }
Jet mul(const Jet& a, const Jet& b) { return a * b; }

Jet partial(const Jet& a, std::size_t var) {
  if (var >= a.nvars()) throw DomainError("partial derivative variable out of range");
  if (a.valid_order() < 1) throw OrderError("cannot differentiate a jet of valid order 0");
  std::vector<Jet::Term> terms;
  for (const auto& [m, c] : a.terms()) {
    const unsigned e = m[var];
    if (e == 0) continue;
    Complex d = c;
    d.re() *= e;
    d.im() *= e;
    terms.emplace_back(m - Monomial::unit(var), std::move(d));
  }
  sort_terms(terms);
  return JetBuilder::make(a.chart(), a.max_order(), a.valid_order() - 1, std::move(terms));
}

namespace {

/// sum_k s_k t^k for t without constant term, truncated at t's valid order.
Jet series_compose(const std::vector<Complex>& s, const Jet& t) {
  const int v = t.valid_order();
  Jet result = Jet::constant(t.chart(), t.max_order(), s.back()).truncated(v);
  for (int k = static_cast<int>(s.size()) - 2; k >= 0; --k) {
    result = result * t;
    result += Jet::constant(t.chart(), t.max_order(), s[static_cast<std::size_t>(k)]).truncated(v);
  }
  return result;
}

Jet without_constant(const Jet& a) { return a - Jet::constant(a.chart(), a.max_order(), a.constant_term()); }

}  // namespace

Jet invert(const Jet& a) {
  const Complex c = a.constant_term();
  if (c.is_zero()) throw DomainError("cannot invert a jet with zero constant term");
  const Complex cinv = c.inverse();
  // 1/(c(1+t)) = c^{-1} sum (-t)^k
  Jet t = without_constant(a) * cinv;
  std::vector<Complex> s(static_cast<std::size_t>(a.valid_order()) + 1);
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = Complex(k % 2 == 0 ? 1 : -1);
  return series_compose(s, t) * cinv;
}

Jet power(const Jet& a, unsigned exponent) {
  Jet result = Jet::constant(a.chart(), a.max_order(), Complex(1)).truncated(a.valid_order());
  Jet base = a;
  while (exponent != 0) {
    if (exponent & 1u) result = result * base;
    exponent >>= 1;
    if (exponent != 0) base = base * base;
  }
  return result;
}

std::optional<ElementaryFunction> elementary_from_name(std::string_view name) {
  if (name == "exp") return ElementaryFunction::Exp;
  if (name == "log") return ElementaryFunction::Log;
  if (name == "sqrt") return ElementaryFunction::Sqrt;
  if (name == "sin") return ElementaryFunction::Sin;
  if (name == "cos") return ElementaryFunction::Cos;
  return std::nullopt;
}

std::string_view elementary_name(ElementaryFunction f) {
  switch (f) {
    case ElementaryFunction::Exp: return "exp";
    case ElementaryFunction::Log: return "log";
    case ElementaryFunction::Sqrt: return "sqrt";
    case ElementaryFunction::Sin: return "sin";
    case ElementaryFunction::Cos: return "cos";
  }
  return "?";
}

Jet elementary(ElementaryFunction f, const Jet& a) {
  const int v = a.valid_order();
  const std::size_t n = static_cast<std::size_t>(v) + 1;
  const Complex c = a.constant_term();
  std::vector<Complex> s(n);
  Rational factorial(1);
  switch (f) {
    case ElementaryFunction::Exp:
    case ElementaryFunction::Sin:
    case ElementaryFunction::Cos: {
      // Values at a nonzero rational are transcendental.
      if (!c.is_zero()) {
        throw DomainError(std::string(elementary_name(f)) + " needs a vanishing constant term for an exact expansion");
      }
      for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) factorial *= static_cast<long>(k);
        Rational term = Rational(1) / factorial;
        if (f == ElementaryFunction::Exp) {
          s[k] = Complex(term);
        } else if (f == ElementaryFunction::Sin && k % 2 == 1) {
          s[k] = Complex((k / 2) % 2 == 0 ? term : Rational(-term));
        } else if (f == ElementaryFunction::Cos && k % 2 == 0) {
          s[k] = Complex((k / 2) % 2 == 0 ? term : Rational(-term));
        }
      }
      return series_compose(s, a);
    }
    case ElementaryFunction::Log: {
      if (c != Complex(1)) throw DomainError("log needs constant term 1 for an exact expansion");
      for (std::size_t k = 1; k < n; ++k) s[k] = Complex(Rational(k % 2 == 1 ? 1 : -1, static_cast<long>(k)));
      return series_compose(s, without_constant(a));
    }
    case ElementaryFunction::Sqrt: {
      if (c.is_zero()) throw DomainError("sqrt of a jet with zero constant term");
      auto root = c.sqrt();
      if (!root) throw DomainError("sqrt needs a constant term that is an exact square, got " + c.str());
      // sqrt(c) * sum binom(1/2, k) u^k with u = (a - c)/c
      Rational binom(1);
      for (std::size_t k = 0; k < n; ++k) {
        s[k] = Complex(binom);
        binom *= Rational(1, 2) - static_cast<long>(k);
        binom /= static_cast<long>(k + 1);
      }
      return series_compose(s, without_constant(a) * c.inverse()) * *root;
    }
  }
  throw DomainError("unknown elementary function");
}

Jet conjugate(const Jet& a) {
  const Chart& chart = *a.chart();
  if (!chart.has_conjugation()) throw DomainError("chart has no conjugation pairing");
  std::vector<Jet::Term> terms;
  terms.reserve(a.size());
  for (const auto& [m, c] : a.terms()) {
    Monomial out;
    for (std::size_t v = 0; v < chart.dim(); ++v) out = out.with(chart.partner(v), m[v]);
    terms.emplace_back(out, c.conj());
  }
  sort_terms(terms);
  return JetBuilder::make(a.chart(), a.max_order(), a.valid_order(), std::move(terms));
}

Jet euler(const Jet& a, const std::vector<std::size_t>& vars) {
  std::vector<Jet::Term> terms;
  for (const auto& [m, c] : a.terms()) {
    long d = 0;
    for (auto v : vars) d += m[v];
    if (d == 0) continue;
    Complex x = c;
    x.re() *= d;
    x.im() *= d;
    terms.emplace_back(m, std::move(x));
  }
  return JetBuilder::make(a.chart(), a.max_order(), a.valid_order(), std::move(terms));
}

int degree_in(const Jet& a, const std::vector<std::size_t>& vars) {
  int best = -1;
  for (const auto& t : a.terms()) {
    int d = 0;
    for (auto v : vars) d += static_cast<int>(t.first[v]);
    best = std::max(best, d);
  }
  return best;
}

Jet coefficient_in(const Jet& a, const std::vector<std::size_t>& vars, Monomial m) {
  std::vector<Jet::Term> terms;
  unsigned picked = 0;
  for (auto v : vars) picked += m[v];
  for (const auto& [mono, c] : a.terms()) {
    bool match = true;
    Monomial rest = mono;
    for (auto v : vars) {
      if (mono[v] != m[v]) {
        match = false;
        break;
      }
      rest = rest.with(v, 0);
    }
    if (match) terms.emplace_back(rest, c);
  }
  sort_terms(terms);
  const int valid = a.valid_order() - static_cast<int>(picked);
  if (valid < 0) throw OrderError("coefficient extraction beyond valid order");
  return JetBuilder::make(a.chart(), a.max_order(), valid, std::move(terms));
}

Jet restrict_to(const Jet& a, const ChartPtr& target, const std::vector<std::size_t>& keep) {
  std::vector<Jet::Term> terms;
  for (const auto& [m, c] : a.terms()) {
    Monomial out;
    unsigned kept = 0;
    for (std::size_t i = 0; i < keep.size(); ++i) {
      out = out.with(i, m[keep[i]]);
      kept += m[keep[i]];
    }
    if (kept != m.degree()) throw StructureError("jet depends on variables outside the target chart");
    terms.emplace_back(out, c);
  }
  sort_terms(terms);
  return JetBuilder::make(target, a.max_order(), a.valid_order(), std::move(terms));
}

Jet extend_to(const Jet& a, const ChartPtr& target, const std::vector<std::size_t>& placement, int order) {
  std::vector<Jet::Term> terms;
  for (const auto& [m, c] : a.terms()) {
    Monomial out;
    for (std::size_t i = 0; i < placement.size(); ++i) out = out.with(placement[i], m[i]);
    terms.emplace_back(out, c);
  }
  sort_terms(terms);
  return JetBuilder::make(target, std::max(order, a.max_order()), a.valid_order(), std::move(terms));
}

JetMatrix invert_matrix(const JetMatrix& m) {
  const std::size_t n = m.size();
  JetMatrix a = m;
  JetMatrix inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != n) throw DomainError("matrix is not square");
    const Jet& ref = a[i][0];
    for (std::size_t j = 0; j < n; ++j) {
      inv[i].push_back(Jet::constant(ref.chart(), ref.max_order(), Complex(i == j ? 1 : 0)));
    }
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = n;
    for (std::size_t r = col; r < n; ++r) {
      if (!a[r][col].constant_term().is_zero()) {
        pivot = r;
        break;
      }
    }
    if (pivot == n) throw DomainError("matrix is singular at the base point");
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    const Jet p = invert(a[col][col]);
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] = a[col][j] * p;
      inv[col][j] = inv[col][j] * p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col].is_zero()) continue;
      const Jet factor = a[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= factor * a[col][j];
        inv[r][j] -= factor * inv[col][j];
      }
    }
  }
  return inv;
}

Jet determinant(const JetMatrix& m) {
  const std::size_t n = m.size();
  JetMatrix a = m;
  Jet det = Jet::constant(a[0][0].chart(), a[0][0].max_order(), Complex(1));
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = n;
    for (std::size_t r = col; r < n; ++r) {
      if (!a[r][col].constant_term().is_zero()) {
        pivot = r;
        break;
      }
    }
    if (pivot == n) throw DomainError("determinant of a matrix singular at the base point");
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      det = -det;
    }
    det = det * a[col][col];
    const Jet p = invert(a[col][col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      if (a[r][col].is_zero()) continue;
      const Jet factor = a[r][col] * p;
      for (std::size_t j = col; j < n; ++j) a[r][j] -= factor * a[col][j];
    }
  }
  return det;
}

std::string Jet::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.str() << ")";
    for (std::size_t v = 0; v < nvars(); ++v) {
      const unsigned e = m[v];
      if (e == 0) continue;
      const std::string name =
          chart_->base(v).is_zero() ? chart_->name(v) : "(" + chart_->name(v) + "-" + chart_->base(v).str() + ")";
      os << "*" << name;
      if (e > 1) os << "^" << e;
    }
  }
  return os.str();
}

}  // namespace fedosov
