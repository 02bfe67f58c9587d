#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fedosov/scalar.hpp"

namespace fedosov {

inline constexpr std::size_t kMaxVariables = 8;

/// Exponent multi-index, one byte per variable packed into a word.
class Monomial {
 public:
  constexpr Monomial() = default;
  constexpr explicit Monomial(std::uint64_t bits) : bits_(bits) {}

  static Monomial unit(std::size_t var, unsigned power = 1) {
    return Monomial(static_cast<std::uint64_t>(power) << (8 * var));
  }

  unsigned operator[](std::size_t var) const { return (bits_ >> (8 * var)) & 0xffu; }
  unsigned degree() const { return static_cast<unsigned>((bits_ * 0x0101010101010101ull) >> 56); }
  std::uint64_t bits() const { return bits_; }

  Monomial with(std::size_t var, unsigned power) const {
    const std::uint64_t mask = 0xffull << (8 * var);
    return Monomial((bits_ & ~mask) | (static_cast<std::uint64_t>(power) << (8 * var)));
  }
  /// Componentwise sum; callers keep every exponent below 256.
  friend Monomial operator+(Monomial a, Monomial b) { return Monomial(a.bits_ + b.bits_); }
  /// Componentwise difference; requires b <= a.
  friend Monomial operator-(Monomial a, Monomial b) { return Monomial(a.bits_ - b.bits_); }
  bool divides(Monomial other, std::size_t nvars) const;

  friend bool operator==(Monomial a, Monomial b) { return a.bits_ == b.bits_; }
  friend bool operator!=(Monomial a, Monomial b) { return a.bits_ != b.bits_; }
  /// Graded order: total degree first, then packed bits.
  friend bool operator<(Monomial a, Monomial b) {
    const unsigned da = a.degree(), db = b.degree();
    return da != db ? da < db : a.bits_ < b.bits_;
  }

 private:
  std::uint64_t bits_ = 0;
};

/// Ordered coordinate names with base-point values; optional conjugation pairing.
class Chart {
 public:
  Chart(std::vector<std::string> names, std::vector<Complex> base_point,
        std::vector<int> conjugate_partner = {});

  std::size_t dim() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  const std::vector<std::string>& names() const { return names_; }
  const Complex& base(std::size_t i) const { return base_[i]; }
  const std::vector<Complex>& base_point() const { return base_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  bool has_conjugation() const { return !partner_.empty(); }
  std::size_t partner(std::size_t i) const { return static_cast<std::size_t>(partner_[i]); }

 private:
  std::vector<std::string> names_;
  std::vector<Complex> base_;
  std::vector<int> partner_;
};

using ChartPtr = std::shared_ptr<const Chart>;

/// Same names and base point.
bool same_chart(const ChartPtr& a, const ChartPtr& b);

ChartPtr make_chart(std::vector<std::string> names, std::vector<Complex> base_point,
                    std::vector<int> conjugate_partner = {});

/// Truncated Taylor expansion about the chart base point in the displacement
/// variables x - x0.  Coefficients beyond valid_order are unknown and never stored.
class Jet {
 public:
  using Term = std::pair<Monomial, Complex>;

  Jet() = default;
  Jet(ChartPtr chart, int order);

  static Jet constant(ChartPtr chart, int order, Complex value);
  /// The coordinate function x_i itself: base value plus displacement.
  static Jet variable(ChartPtr chart, int order, std::size_t i);
  static Jet monomial(ChartPtr chart, int order, Monomial m, Complex coeff = Complex(1));
  static Jet from_terms(ChartPtr chart, int order, std::vector<Term> terms);

  const ChartPtr& chart() const { return chart_; }
  std::size_t nvars() const { return chart_ ? chart_->dim() : 0; }
  int max_order() const { return max_order_; }
  int valid_order() const { return valid_order_; }
  /// Terms in graded monomial order, zero coefficients never stored.
  const std::vector<Term>& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Complex coeff(Monomial m) const;
  Complex constant_term() const { return coeff(Monomial()); }
  std::size_t size() const { return terms_.size(); }

  /// Drops coefficients above `order`; valid_order becomes min(valid, order).
  Jet truncated(int order) const;

  Jet operator-() const;
  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Complex& c);
  Jet& scale(const Rational& r);
  /// this += c * o; valid_order becomes the minimum.
  void add_scaled(const Jet& o, const Complex& c);
  void add_scaled(const Jet& o, const Rational& r);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, const Complex& c) { return a *= c; }
  friend Jet operator*(const Complex& c, Jet a) { return a *= c; }
  friend Jet operator*(const Jet& a, const Jet& b);

  /// Coefficients and valid order both equal.
  friend bool operator==(const Jet& a, const Jet& b);
  friend bool operator!=(const Jet& a, const Jet& b) { return !(a == b); }

  std::string str() const;

 private:
  friend class JetBuilder;
  void check_same_chart(const Jet& o) const;

  ChartPtr chart_;
  int max_order_ = 0;
  int valid_order_ = 0;
  std::vector<Term> terms_;
};

/// Coefficientwise equality through min(valid orders) (or through `order` if smaller).
bool agree(const Jet& a, const Jet& b, std::optional<int> order = std::nullopt);

Jet add(const Jet& a, const Jet& b);
Jet mul(const Jet& a, const Jet& b);
Jet partial(const Jet& a, std::size_t var);
Jet invert(const Jet& a);
Jet power(const Jet& a, unsigned exponent);

enum class ElementaryFunction { Exp, Log, Sqrt, Sin, Cos };
std::optional<ElementaryFunction> elementary_from_name(std::string_view name);
std::string_view elementary_name(ElementaryFunction f);
Jet elementary(ElementaryFunction f, const Jet& a);

/// Swaps conjugate-paired variables and conjugates coefficients.
Jet conjugate(const Jet& a);

/// Multiplies each coefficient by the degree of its monomial in `vars`
/// (the Euler operator sum_v x_v d/dx_v, exact when the base point of those variables is zero).
Jet euler(const Jet& a, const std::vector<std::size_t>& vars);

/// Degree of the jet in the variables `vars` (max over stored monomials), -1 for the zero jet.
int degree_in(const Jet& a, const std::vector<std::size_t>& vars);

/// Coefficient of prod_{v in vars} x_v^{m_v}: a jet in the remaining variables on the same chart.
Jet coefficient_in(const Jet& a, const std::vector<std::size_t>& vars, Monomial m);

/// Reinterprets a jet whose support avoids the dropped variables on a smaller chart.
/// `keep[i]` is the index in the source chart of variable i of `target`.
Jet restrict_to(const Jet& a, const ChartPtr& target, const std::vector<std::size_t>& keep);
/// Embeds a jet on a sub-chart into a larger chart.
Jet extend_to(const Jet& a, const ChartPtr& target, const std::vector<std::size_t>& placement,
              int order);

/// Square matrix of jets, row-major.
using JetMatrix = std::vector<std::vector<Jet>>;
JetMatrix invert_matrix(const JetMatrix& m);
Jet determinant(const JetMatrix& m);

}  // namespace fedosov
