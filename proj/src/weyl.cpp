#include "fedosov/weyl.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <unordered_map>

#include "fedosov/error.hpp"

namespace fedosov {

int HbarSeries::valid_order() const {
  int v = 1 << 20;
  for (const auto& c : coeffs) v = std::min(v, c.valid_order());
  return v;
}

std::string HbarSeries::str() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < coeffs.size(); ++k) os << "hbar^" << k << ": " << coeffs[k].str() << "\n";
  return os.str();
}

WeylAlgebra::WeylAlgebra(ChartPtr chart, JetMatrix omega_inv)
    : chart_(std::move(chart)), omega_inv_(std::move(omega_inv)) {
  static std::atomic<std::uint64_t> next_id{1};
  id_ = next_id++;
  const std::size_t n = chart_->dim();
  if (omega_inv_.size() != n) throw DomainError("Poisson tensor has wrong dimension");
  for (std::size_t i = 0; i < n; ++i) {
    if (omega_inv_[i].size() != n) throw DomainError("Poisson tensor has wrong dimension");
    for (std::size_t j = 0; j < n; ++j) {
      const Jet& w = omega_inv_[i][j];
      if (!agree(w, -omega_inv_[j][i])) throw DomainError("Poisson tensor is not antisymmetric");
      if (w.is_zero()) continue;
      if (!w.is_constant()) constant_ = false;
      edges_.push_back(Edge{static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j), w, w.constant_term()});
    }
  }
}

const Jet& WeylAlgebra::omega_product(const std::vector<std::uint8_t>& counts) const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = omega_products_.find(counts);
  if (it != omega_products_.end()) return it->second;
  Jet prod = Jet::constant(chart_, omega_inv_[0][0].max_order(), Complex(1));
  int valid = 1 << 20;
  for (const auto& e : edges_) valid = std::min(valid, e.value.valid_order());
  prod = prod.truncated(std::min(valid, prod.valid_order()));
  for (std::size_t e = 0; e < counts.size(); ++e) {
    for (unsigned c = 0; c < counts[e]; ++c) prod = prod * edges_[e].value;
  }
  return omega_products_.emplace(counts, std::move(prod)).first->second;
}

int wedge_sign(std::uint16_t a, std::uint16_t b) {
  if ((a & b) != 0) return 0;
  int swaps = 0;
  for (std::uint16_t rest = b; rest != 0; rest &= static_cast<std::uint16_t>(rest - 1)) {
    const int bit = __builtin_ctz(rest);
    swaps += __builtin_popcount(static_cast<unsigned>(a) >> (bit + 1));
  }
  return (swaps % 2 == 0) ? 1 : -1;
}

namespace {

/// One way of contracting y^alpha with y^beta: removes mu from the left and nu from
/// the right factor using m = |mu| = |nu| omega-pairings.
struct Contraction {
  Monomial mu;
  Monomial nu;
  int m = 0;
  Complex constant;  // full scalar factor when omega is constant
  std::vector<std::pair<std::vector<std::uint8_t>, Complex>> by_counts;  // otherwise
};

Rational falling_factorial(unsigned n, unsigned k) {
  Rational r(1);
  for (unsigned t = 0; t < k; ++t) r *= static_cast<long>(n - t);
  return r;
}

class ContractionCache {
 public:
  const std::vector<Contraction>& get(const WeylAlgebra& alg, Monomial a, Monomial b) {
    if (alg.id() != owner_) {
      table_.clear();
      owner_ = alg.id();
    }
    const Key key{a.bits(), b.bits()};
    auto it = table_.find(key);
    if (it != table_.end()) return it->second;
    return table_.emplace(key, build(alg, a, b)).first->second;
  }

 private:
  struct Key {
    std::uint64_t a, b;
    bool operator==(const Key& o) const { return a == o.a && b == o.b; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const { return std::hash<std::uint64_t>()(k.a * 0x9e3779b97f4a7c15ull ^ k.b); }
  };

  static std::vector<Contraction> build(const WeylAlgebra& alg, Monomial a, Monomial b) {
    const auto& edges = alg.edges();
    std::vector<std::uint8_t> counts(edges.size(), 0);
    std::vector<Contraction> out;
    const std::size_t n = alg.dim();
    std::vector<unsigned> row(n, 0), col(n, 0);

    auto emit = [&]() {
      Monomial mu, nu;
      int m = 0;
      for (std::size_t v = 0; v < n; ++v) {
        mu = mu.with(v, row[v]);
        nu = nu.with(v, col[v]);
        m += static_cast<int>(row[v]);
      }
      Rational r(1);
      for (std::size_t v = 0; v < n; ++v) {
        r *= falling_factorial(a[v], row[v]);
        r *= falling_factorial(b[v], col[v]);
      }
      for (auto c : counts) r /= falling_factorial(c, c);
      r /= Rational(1L << m);  // (1/2)^m
      Complex scalar(r);
      static const Complex kI = Complex::i();
      for (int t = 0; t < m; ++t) scalar *= kI;
      auto found = std::find_if(out.begin(), out.end(), [&](const Contraction& c) { return c.mu == mu && c.nu == nu; });
      if (found == out.end()) {
        out.push_back(Contraction{mu, nu, m, Complex(), {}});
        found = out.end() - 1;
      }
      if (alg.constant_omega()) {
        Complex w = scalar;
        for (std::size_t e = 0; e < counts.size(); ++e) {
          for (unsigned c = 0; c < counts[e]; ++c) w *= edges[e].constant;
        }
        found->constant += w;
      } else {
        found->by_counts.emplace_back(counts, scalar);
      }
    };

    // Depth-first over the multiplicity of each edge.
    auto recurse = [&](auto&& self, std::size_t e) -> void {
      if (e == edges.size()) {
        emit();
        return;
      }
      const auto i = edges[e].from, j = edges[e].to;
      for (unsigned c = 0;; ++c) {
        counts[e] = static_cast<std::uint8_t>(c);
        self(self, e + 1);
        if (row[i] + 1 > a[i] || col[j] + 1 > b[j]) break;
        ++row[i];
        ++col[j];
      }
      row[i] -= counts[e];
      col[j] -= counts[e];
      counts[e] = 0;
    };
    recurse(recurse, 0);
    if (alg.constant_omega()) {
      std::erase_if(out, [](const Contraction& c) { return c.constant.is_zero(); });
    }
    return out;
  }

  std::uint64_t owner_ = 0;
  std::unordered_map<Key, std::vector<Contraction>, KeyHash> table_;
};

ContractionCache& contraction_cache() {
  thread_local ContractionCache cache;
  return cache;
}

bool parity_ok(int m, ContractionParity parity) {
  switch (parity) {
    case ContractionParity::All: return true;
    case ContractionParity::Odd: return m % 2 == 1;
    case ContractionParity::Even: return m % 2 == 0;
  }
  return true;
}

/// Moves the floors of `from` by (dd, dl), lowered by `loss`, onto `to` and truncates the
/// stored summands there: a zero known only to some order pollutes whatever it lands on.
void carry_floors(const WeylForm& from, WeylForm& to, int dd, int dl, int loss = 0) {
  WeylForm::Floors moved;
  for (const auto& [dl0, f] : from.floors()) {
    const auto key = std::make_pair(dl0.first + dd, dl0.second + dl);
    if (key.second < 0) continue;
    auto [it, fresh] = moved.try_emplace(key, f - loss);
    if (!fresh) it->second = std::min(it->second, f - loss);
  }
  to.lower_floors(moved, true);
}

/// Lowest valid order per (degree2, y-degree) class over stored terms and floors.
WeylForm::Floors content_by_class(const WeylForm& a) {
  WeylForm::Floors v = a.floors();
  for (const auto& [k, c] : a.terms()) {
    auto [it, fresh] = v.try_emplace({k.degree2(), static_cast<int>(k.sym_degree())}, c.valid_order());
    if (!fresh) it->second = std::min(it->second, c.valid_order());
  }
  return v;
}

}  // namespace

WeylForm::WeylForm(WeylAlgebraPtr algebra, int cap2) : algebra_(std::move(algebra)), cap2_(cap2) {}

WeylForm WeylForm::scalar(WeylAlgebraPtr algebra, int cap2, const Jet& f) {
  WeylForm w(std::move(algebra), cap2);
  w.accumulate(WeylKey{}, f);
  return w;
}

WeylForm WeylForm::term(WeylAlgebraPtr algebra, int cap2, WeylKey key, const Jet& coeff) {
  WeylForm w(std::move(algebra), cap2);
  w.accumulate(key, coeff);
  return w;
}

Jet WeylForm::coeff(const WeylKey& key) const {
  auto it = terms_.find(key);
  if (it != terms_.end()) return it->second;
  return Jet(algebra_->chart(), std::min(floor(key.degree2(), static_cast<int>(key.sym_degree())), 1 << 10));
}

int WeylForm::valid_order() const {
  int v = kExact;
  for (const auto& [k, c] : terms_) v = std::min(v, c.valid_order());
  for (const auto& [k, f] : floors_) v = std::min(v, f);
  return v;
}

int WeylForm::floor(int d2, int l) const {
  auto it = floors_.find({d2, l});
  return it == floors_.end() ? kExact : it->second;
}

void WeylForm::lower_floors(const Floors& f, bool spread) {
  bool any = false;
  for (const auto& [k, order] : f) {
    if (k.first < 0 || k.first > cap2_ || k.second < 0 || k.second > k.first || order >= kExact) continue;
    const int v = std::max(order, 0);
    auto [it, fresh] = floors_.try_emplace(k, v);
    if (!fresh) it->second = std::min(it->second, v);
    any = true;
  }
  if (!spread || !any) return;
  for (auto it = terms_.begin(); it != terms_.end();) {
    const int fl = floor(it->first.degree2(), static_cast<int>(it->first.sym_degree()));
    if (fl < it->second.valid_order()) {
      it->second = it->second.truncated(fl);
      if (it->second.is_zero()) {
        it = terms_.erase(it);
        continue;
      }
    }
    ++it;
  }
}

void WeylForm::insert(const WeylKey& key, Jet coeff) {
  const int d = key.degree2(), l = static_cast<int>(key.sym_degree());
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    const int f = floor(d, l);
    if (coeff.valid_order() > f) coeff = coeff.truncated(f);
    if (coeff.is_zero()) {
      lower_floor(d, l, coeff.valid_order());
    } else {
      terms_.emplace(key, std::move(coeff));
    }
    return;
  }
  it->second += coeff;
  if (it->second.is_zero()) {
    lower_floor(d, l, it->second.valid_order());
    terms_.erase(it);
  }
}

void WeylForm::accumulate(const WeylKey& key, const Jet& coeff) {
  if (key.degree2() > cap2_) return;
  insert(key, coeff);
}

void WeylForm::accumulate_scaled(const WeylKey& key, const Jet& coeff, const Complex& c) {
  if (key.degree2() > cap2_ || c.is_zero()) return;
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    insert(key, coeff * c);
    return;
  }
  it->second.add_scaled(coeff, c);
  if (it->second.is_zero()) {
    lower_floor(key.degree2(), static_cast<int>(key.sym_degree()), it->second.valid_order());
    terms_.erase(it);
  }
}

void WeylForm::check_compatible(const WeylForm& o) const {
  if (!algebra_ || !o.algebra_) return;
  if (algebra_ != o.algebra_) throw ChartMismatch("Weyl forms belong to different algebras");
}

WeylForm& WeylForm::operator+=(const WeylForm& o) {
  if (!algebra_) {
    *this = o;
    return *this;
  }
  check_compatible(o);
  cap2_ = std::min(cap2_, o.cap2_);
  std::erase_if(terms_, [this](const auto& kv) { return kv.first.degree2() > cap2_; });
  std::erase_if(floors_, [this](const auto& kv) { return kv.first.first > cap2_; });
  // summands absent from o are zero there only through o's floor
  for (auto it = terms_.begin(); it != terms_.end();) {
    const int f = o.floor(it->first.degree2(), static_cast<int>(it->first.sym_degree()));
    if (f < it->second.valid_order() && !o.terms_.count(it->first)) {
      it->second = it->second.truncated(f);
      if (it->second.is_zero()) {
        lower_floor(it->first.degree2(), static_cast<int>(it->first.sym_degree()), f);
        it = terms_.erase(it);
        continue;
      }
    }
    ++it;
  }
  for (const auto& [k, c] : o.terms_) accumulate(k, c);
  lower_floors(o.floors_);
  return *this;
}

WeylForm& WeylForm::operator-=(const WeylForm& o) { return *this += -o; }

WeylForm& WeylForm::operator*=(const Complex& c) {
  if (c.is_zero()) {
    for (const auto& [k, v] : terms_) lower_floor(k.degree2(), static_cast<int>(k.sym_degree()), v.valid_order());
    terms_.clear();
    return *this;
  }
  for (auto& [k, v] : terms_) v *= c;
  return *this;
}

WeylForm WeylForm::operator-() const {
  WeylForm out = *this;
  for (auto& [k, v] : out.terms_) v = -v;
  return out;
}

WeylForm WeylForm::times_function(const Jet& f) const {
  WeylForm out(algebra_, cap2_);
  Floors fl = floors_;
  for (auto& [k, v] : fl) v = std::min(v, f.valid_order());
  out.lower_floors(fl);
  for (const auto& [k, v] : terms_) out.accumulate(k, v * f);
  return out;
}

WeylForm WeylForm::with_cap(int cap2) const {
  WeylForm out(algebra_, cap2);
  for (const auto& [k, v] : terms_) {
    if (k.degree2() <= cap2) out.terms_.emplace(k, v);
  }
  out.lower_floors(floors_);
  return out;
}

WeylForm WeylForm::truncated_jets(int order) const {
  WeylForm out(algebra_, cap2_);
  order = std::max(0, order);
  Floors fl = floors_;
  for (auto& [k, v] : fl) v = std::min(v, order);
  out.lower_floors(fl);
  for (const auto& [k, v] : terms_) out.accumulate(k, v.truncated(order));
  return out;
}

bool agree(const WeylForm& a, const WeylForm& b) {
  const int cap = std::min(a.cap2_, b.cap2_);
  for (const auto& [k, c] : a.terms_) {
    if (k.degree2() <= cap && !agree(c, b.coeff(k))) return false;
  }
  for (const auto& [k, c] : b.terms_) {
    if (k.degree2() <= cap && !a.terms_.count(k) && !agree(a.coeff(k), c)) return false;
  }
  return true;
}

std::string WeylForm::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  const auto& chart = *algebra_->chart();
  for (const auto& [k, c] : terms_) {
    os << "[" << c.str() << "]";
    if (k.hbar > 0) os << " hbar^" << int(k.hbar);
    for (std::size_t v = 0; v < chart.dim(); ++v) {
      if (k.y[v] > 0) os << " y_" << chart.name(v) << (k.y[v] > 1 ? "^" + std::to_string(k.y[v]) : "");
    }
    bool first = true;
    for (std::size_t v = 0; v < chart.dim(); ++v) {
      if (k.form & (1u << v)) {
        os << (first ? " " : "^") << "d" << chart.name(v);
        first = false;
      }
    }
    os << "\n";
  }
  return os.str();
}

WeylForm weyl_mul_parity(const WeylForm& a, const WeylForm& b, ContractionParity parity) {
  if (!a.algebra() || !b.algebra()) return WeylForm();
  if (a.algebra() != b.algebra()) throw ChartMismatch("Weyl forms belong to different algebras");
  const WeylAlgebra& alg = *a.algebra();
  const int cap = std::min(a.cap2(), b.cap2());
  WeylForm out(a.algebra(), cap);
  ContractionCache& cache = contraction_cache();

  // For non-constant omega, defer the multiplication by omega products to the end.
  std::map<std::pair<WeylKey, std::vector<std::uint8_t>>, Jet> deferred;

  for (const auto& [ka, ja] : a.terms()) {
    const int da = ka.degree2();
    if (da > cap) break;
    for (const auto& [kb, jb] : b.terms()) {
      if (da + kb.degree2() > cap) break;
      const int sign = wedge_sign(ka.form, kb.form);
      if (sign == 0) continue;
      const auto& entries = cache.get(alg, ka.y, kb.y);
      std::optional<Jet> product;
      for (const auto& e : entries) {
        if (!parity_ok(e.m, parity)) continue;
        if (!product) {
          product = ja * jb;
          if (sign < 0) *product = -*product;
        }
        const WeylKey key{static_cast<std::uint8_t>(ka.hbar + kb.hbar + e.m), (ka.y - e.mu) + (kb.y - e.nu),
                          static_cast<std::uint16_t>(ka.form | kb.form)};
        if (alg.constant_omega()) {
          out.accumulate_scaled(key, *product, e.constant);
        } else {
          for (const auto& [counts, scalar] : e.by_counts) {
            auto [it, inserted] = deferred.try_emplace({key, counts}, *product * scalar);
            if (!inserted) it->second.add_scaled(*product, scalar);
          }
        }
      }
    }
  }
  for (const auto& [kc, acc] : deferred) {
    out.accumulate(kc.first, acc * alg.omega_product(kc.second));
  }
  // A floor in one factor meets every class of the other; m contractions send
  // (da, la) x (db, lb) to (da + db, la + lb - 2m).
  int omega_valid = WeylForm::kExact;
  if (!alg.constant_omega()) {
    for (const auto& e : alg.edges()) omega_valid = std::min(omega_valid, e.value.valid_order());
  }
  WeylForm::Floors reached;
  auto spread = [&](const WeylForm& x, const WeylForm::Floors& other) {
    for (const auto& [cx, fx] : x.floors()) {
      for (const auto& [cy, vy] : other) {
        const int d = cx.first + cy.first;
        if (d > cap) continue;
        for (int m = 0; m <= std::min(cx.second, cy.second); ++m) {
          if (!parity_ok(m, parity)) continue;
          const int v = std::min({fx, vy, omega_valid});
          auto [it, fresh] = reached.try_emplace({d, cx.second + cy.second - 2 * m}, v);
          if (!fresh) it->second = std::min(it->second, v);
        }
      }
    }
  };
  if (!a.floors().empty()) spread(a, content_by_class(b));
  if (!b.floors().empty()) spread(b, content_by_class(a));
  out.lower_floors(reached, true);
  return out;
}

WeylForm weyl_mul(const WeylForm& a, const WeylForm& b) { return weyl_mul_parity(a, b, ContractionParity::All); }

WeylForm graded_commutator(const WeylForm& a, const WeylForm& b) {
  WeylForm odd = weyl_mul_parity(a, b, ContractionParity::Odd);
  return odd * Complex(2);
}

namespace {

/// Sign of moving dx^k in front of the forms in `form` below k.
int front_sign(std::uint16_t form, std::size_t k) {
  const unsigned below = static_cast<unsigned>(form) & ((1u << k) - 1u);
  return (__builtin_popcount(below) % 2 == 0) ? 1 : -1;
}

}  // namespace

WeylForm op_delta(const WeylForm& a) {
  WeylForm out(a.algebra(), a.cap2());
  const std::size_t n = a.algebra() ? a.algebra()->dim() : 0;
  for (const auto& [key, c] : a.terms()) {
    for (std::size_t k = 0; k < n; ++k) {
      const unsigned e = key.y[k];
      if (e == 0 || (key.form & (1u << k))) continue;
      const WeylKey nk{key.hbar, key.y - Monomial::unit(k), static_cast<std::uint16_t>(key.form | (1u << k))};
      out.accumulate_scaled(nk, c, Complex(static_cast<long>(e) * front_sign(key.form, k)));
    }
  }
  carry_floors(a, out, -1, -1);
  return out;
}

WeylForm op_delta_star(const WeylForm& a) {
  WeylForm out(a.algebra(), a.cap2());
  const std::size_t n = a.algebra() ? a.algebra()->dim() : 0;
  for (const auto& [key, c] : a.terms()) {
    for (std::size_t k = 0; k < n; ++k) {
      if (!(key.form & (1u << k))) continue;
      const WeylKey nk{key.hbar, key.y + Monomial::unit(k), static_cast<std::uint16_t>(key.form & ~(1u << k))};
      out.accumulate_scaled(nk, c, Complex(front_sign(key.form, k)));
    }
  }
  carry_floors(a, out, 1, 1);
  return out;
}

WeylForm op_delta_inv(const WeylForm& a) {
  WeylForm out(a.algebra(), a.cap2());
  const std::size_t n = a.algebra() ? a.algebra()->dim() : 0;
  for (const auto& [key, c] : a.terms()) {
    const long lp = static_cast<long>(key.y.degree()) + key.form_degree();
    if (lp == 0) continue;
    for (std::size_t k = 0; k < n; ++k) {
      if (!(key.form & (1u << k))) continue;
      const WeylKey nk{key.hbar, key.y + Monomial::unit(k), static_cast<std::uint16_t>(key.form & ~(1u << k))};
      out.accumulate_scaled(nk, c, Complex(Rational(front_sign(key.form, k), lp)));
    }
  }
  carry_floors(a, out, 1, 1);
  return out;
}

WeylForm divide_hbar(const WeylForm& a) {
  WeylForm out(a.algebra(), a.cap2() - 2);
  for (const auto& [key, c] : a.terms()) {
    if (key.hbar == 0) throw DomainError("divide_hbar: element has a nonzero hbar^0 part");
    WeylKey nk = key;
    --nk.hbar;
    out.accumulate(nk, c);
  }
  carry_floors(a, out, -2, 0);
  return out;
}

WeylForm multiply_hbar(const WeylForm& a, int times) {
  WeylForm out(a.algebra(), a.cap2() + 2 * times);
  for (const auto& [key, c] : a.terms()) {
    WeylKey nk = key;
    nk.hbar = static_cast<std::uint8_t>(nk.hbar + times);
    out.accumulate(nk, c);
  }
  carry_floors(a, out, 2 * times, 0);
  return out;
}

WeylForm wedge_dx(std::size_t k, const WeylForm& a) {
  WeylForm out(a.algebra(), a.cap2());
  for (const auto& [key, c] : a.terms()) {
    if (key.form & (1u << k)) continue;
    WeylKey nk = key;
    nk.form = static_cast<std::uint16_t>(key.form | (1u << k));
    out.accumulate_scaled(nk, c, Complex(front_sign(key.form, k)));
  }
  carry_floors(a, out, 0, 0);
  return out;
}

WeylForm exterior_d(const WeylForm& a) {
  WeylForm out(a.algebra(), a.cap2());
  const std::size_t n = a.algebra() ? a.algebra()->dim() : 0;
  for (const auto& [key, c] : a.terms()) {
    for (std::size_t k = 0; k < n; ++k) {
      if (key.form & (1u << k)) continue;
      WeylKey nk = key;
      nk.form = static_cast<std::uint16_t>(key.form | (1u << k));
      Jet d = partial(c, k);
      out.accumulate_scaled(nk, d, Complex(front_sign(key.form, k)));
    }
  }
  carry_floors(a, out, 0, 0, 1);
  return out;
}

WeylForm project(const WeylForm& a, GradedProjection sel) {
  WeylForm out(a.algebra(), a.cap2());
  for (const auto& [key, c] : a.terms()) {
    bool keep = false;
    switch (sel.kind) {
      case GradedProjection::Kind::HbarDegree: keep = key.degree2() == sel.value; break;
      case GradedProjection::Kind::SymDegree: keep = static_cast<int>(key.sym_degree()) == sel.value; break;
      case GradedProjection::Kind::Scalar: keep = key.sym_degree() == 0 && key.form == 0; break;
      case GradedProjection::Kind::FormDegree: keep = key.form_degree() == sel.value; break;
    }
    if (keep) out.accumulate(key, c);
  }
  WeylForm::Floors kept;
  for (const auto& [c, f] : a.floors()) {
    bool keep = true;
    switch (sel.kind) {
      case GradedProjection::Kind::HbarDegree: keep = c.first == sel.value; break;
      case GradedProjection::Kind::SymDegree: keep = c.second == sel.value; break;
      case GradedProjection::Kind::Scalar: keep = c.second == 0; break;
      case GradedProjection::Kind::FormDegree: break;
    }
    if (keep) kept.emplace(c, f);
  }
  out.lower_floors(kept);
  return out;
}

HbarSeries symbol(const WeylForm& a) {
  HbarSeries s;
  const int max_k = a.cap2() / 2;
  const ChartPtr& chart = a.algebra()->chart();
  for (int k = 0; k <= max_k; ++k) s.coeffs.emplace_back(chart, 1 << 10);
  for (const auto& [key, c] : a.terms()) {
    if (key.sym_degree() != 0 || key.form != 0) continue;
    s.coeffs[key.hbar] += c;
  }
  // Coefficients that never received a term carry no information on validity; use the form's floor.
  const int floor = a.valid_order();
  for (auto& c : s.coeffs) {
    if (c.valid_order() == (1 << 10)) c = c.truncated(std::min(floor, 1 << 10));
  }
  return s;
}

}  // namespace fedosov
