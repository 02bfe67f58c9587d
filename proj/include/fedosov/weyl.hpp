#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "fedosov/jet.hpp"

namespace fedosov {

/// Formal power series in hbar with jet coefficients; index = hbar power.
struct HbarSeries {
  std::vector<Jet> coeffs;

  std::size_t size() const { return coeffs.size(); }
  const Jet& operator[](std::size_t k) const { return coeffs[k]; }
  Jet& operator[](std::size_t k) { return coeffs[k]; }
  /// Minimum valid jet order over all coefficients.
  int valid_order() const;
  std::string str() const;
};

/// Fiber data shared by all elements of one truncated Weyl algebra: the chart
/// (fiber index i pairs with coordinate i) and the Poisson tensor omega^{ij}.
class WeylAlgebra {
 public:
  /// `omega_inv[i][j]` = omega^{ij}; must be antisymmetric.
  WeylAlgebra(ChartPtr chart, JetMatrix omega_inv);

  const ChartPtr& chart() const { return chart_; }
  std::size_t dim() const { return chart_->dim(); }
  const Jet& omega_inv(std::size_t i, std::size_t j) const { return omega_inv_[i][j]; }
  bool constant_omega() const { return constant_; }
  /// Unique per instance; keys per-thread caches.
  std::uint64_t id() const { return id_; }

  struct Edge {
    std::uint8_t from;  // index differentiated in the left factor
    std::uint8_t to;    // index differentiated in the right factor
    Jet value;          // omega^{from,to}
    Complex constant;   // value when constant_omega()
  };
  const std::vector<Edge>& edges() const { return edges_; }

  /// Product of omega entries raised to the multiplicities in `counts` (one per edge).
  const Jet& omega_product(const std::vector<std::uint8_t>& counts) const;

 private:
  ChartPtr chart_;
  JetMatrix omega_inv_;
  bool constant_ = true;
  std::uint64_t id_ = 0;
  std::vector<Edge> edges_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::vector<std::uint8_t>, Jet> omega_products_;
};

using WeylAlgebraPtr = std::shared_ptr<const WeylAlgebra>;

/// Index of a homogeneous summand hbar^k y^alpha dx^beta.
struct WeylKey {
  std::uint8_t hbar = 0;
  Monomial y;
  std::uint16_t form = 0;  // bit j set <=> dx^j present; the wedge is taken in increasing order

  /// Twice the hbar-degree: 2k + |alpha|.
  int degree2() const { return 2 * hbar + static_cast<int>(y.degree()); }
  int form_degree() const { return __builtin_popcount(form); }
  unsigned sym_degree() const { return y.degree(); }

  friend bool operator==(const WeylKey& a, const WeylKey& b) {
    return a.hbar == b.hbar && a.y == b.y && a.form == b.form;
  }
  friend bool operator<(const WeylKey& a, const WeylKey& b) {
    const int da = a.degree2(), db = b.degree2();
    if (da != db) return da < db;
    if (a.hbar != b.hbar) return a.hbar < b.hbar;
    if (a.y != b.y) return a.y < b.y;
    return a.form < b.form;
  }
};

/// Sign of dx^{a} ^ dx^{b} relative to the increasing ordering of a|b; 0 if they overlap.
int wedge_sign(std::uint16_t a, std::uint16_t b);

/// Element of the truncated algebra Omega(W): terms with 2k + |alpha| <= cap2.
class WeylForm {
 public:
  using Terms = std::map<WeylKey, Jet>;

  WeylForm() = default;
  WeylForm(WeylAlgebraPtr algebra, int cap2);

  /// Scalar function f as the y-free 0-form.
  static WeylForm scalar(WeylAlgebraPtr algebra, int cap2, const Jet& f);
  /// coeff * hbar^k y^alpha dx^beta
  static WeylForm term(WeylAlgebraPtr algebra, int cap2, WeylKey key, const Jet& coeff);

  const WeylAlgebraPtr& algebra() const { return algebra_; }
  int cap2() const { return cap2_; }
  static constexpr int kExact = 1 << 20;

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  /// Stored coefficient, or the zero jet valid through the floor of the key's degree.
  Jet coeff(const WeylKey& key) const;
  /// Smallest valid jet order among stored terms and floors (kExact if none).
  int valid_order() const;

  /// Validity floors keyed by (degree2, y-degree): absent summands of that class are zero
  /// only through the stored jet order.
  using Floors = std::map<std::pair<int, int>, int>;
  const Floors& floors() const { return floors_; }
  int floor(int d2, int l) const;
  /// Lowers floors; with `spread`, stored summands of those classes are truncated as well.
  void lower_floors(const Floors& f, bool spread = false);
  void lower_floor(int d2, int l, int order, bool spread = false) { lower_floors({{{d2, l}, order}}, spread); }

  /// Adds coeff to the summand at `key`, dropping it beyond the cap.  Zero coefficients are
  /// not stored: a summand that cancels, or a zero contribution, lowers the floor instead.
  void accumulate(const WeylKey& key, const Jet& coeff);
  void accumulate_scaled(const WeylKey& key, const Jet& coeff, const Complex& c);

  WeylForm& operator+=(const WeylForm& o);
  WeylForm& operator-=(const WeylForm& o);
  WeylForm& operator*=(const Complex& c);
  WeylForm operator-() const;
  friend WeylForm operator+(WeylForm a, const WeylForm& b) { return a += b; }
  friend WeylForm operator-(WeylForm a, const WeylForm& b) { return a -= b; }
  friend WeylForm operator*(WeylForm a, const Complex& c) { return a *= c; }
  friend WeylForm operator*(const Complex& c, WeylForm a) { return a *= c; }

  /// Pointwise multiplication of every coefficient by a function.
  WeylForm times_function(const Jet& f) const;
  WeylForm with_cap(int cap2) const;
  /// Every coefficient truncated to its valid order in common with `order`.
  WeylForm truncated_jets(int order) const;

  /// Exact equality of keys and coefficients up to each pair's shared valid order.
  friend bool agree(const WeylForm& a, const WeylForm& b);
  std::string str() const;

 private:
  void check_compatible(const WeylForm& o) const;
  void insert(const WeylKey& key, Jet coeff);

  WeylAlgebraPtr algebra_;
  int cap2_ = 0;
  Terms terms_;
  Floors floors_;
};

enum class ContractionParity { All, Odd, Even };

/// Fiberwise Weyl product combined with the wedge product on form parts.
WeylForm weyl_mul(const WeylForm& a, const WeylForm& b);
/// Only the contraction orders m of the requested parity.
WeylForm weyl_mul_parity(const WeylForm& a, const WeylForm& b, ContractionParity parity);
/// a o b - (-1)^{pq} b o a, computed termwise as twice the odd-contraction part.
WeylForm graded_commutator(const WeylForm& a, const WeylForm& b);

/// dx^k ^ d/dy^k
WeylForm op_delta(const WeylForm& a);
/// y^k i(d/dx^k)
WeylForm op_delta_star(const WeylForm& a);
/// delta^* / (l + p) on each homogeneous component, zero on (0,0).
WeylForm op_delta_inv(const WeylForm& a);

/// Lowers every hbar power by one; throws if an hbar^0 summand is present.
WeylForm divide_hbar(const WeylForm& a);
WeylForm multiply_hbar(const WeylForm& a, int times = 1);

/// dx^k ^ a
WeylForm wedge_dx(std::size_t k, const WeylForm& a);
/// Exterior derivative acting on the jet coefficients only.
WeylForm exterior_d(const WeylForm& a);

struct GradedProjection {
  enum class Kind { HbarDegree, SymDegree, Scalar, FormDegree } kind;
  int value = 0;  // twice the hbar-degree for HbarDegree; degree otherwise

  static GradedProjection hbar_degree2(int d2) { return {Kind::HbarDegree, d2}; }
  static GradedProjection sym_degree(int k) { return {Kind::SymDegree, k}; }
  /// The part in C^infty(M): y-free and form-free.
  static GradedProjection scalar() { return {Kind::Scalar, 0}; }
  static GradedProjection form_degree(int p) { return {Kind::FormDegree, p}; }
};

WeylForm project(const WeylForm& a, GradedProjection sel);

/// The y-free 0-form part as an hbar series (hbar^0 .. max stored power).
HbarSeries symbol(const WeylForm& a);

}  // namespace fedosov
