#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace fedosov {

using Rational = mpq_class;

/// Exact complex number with arbitrary-precision rational parts.
class Complex {
 public:
  Complex() = default;
  Complex(long v) : re_(v) {}  // NOLINT(google-explicit-constructor)
  Complex(Rational re) : re_(std::move(re)) {}  // NOLINT(google-explicit-constructor)
  Complex(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

  static Complex i() { return Complex(Rational(0), Rational(1)); }

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }
  Rational& re() { return re_; }
  Rational& im() { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }

  Complex conj() const { return Complex(re_, -im_); }
  Complex operator-() const { return Complex(-re_, -im_); }

  Complex& operator+=(const Complex& o);
  Complex& operator-=(const Complex& o);
  Complex& operator*=(const Complex& o);
  Complex& operator/=(const Complex& o);

  /// this += a * b without temporaries on the hot path.
  void add_product(const Complex& a, const Complex& b);
  void add_scaled(const Complex& a, const Rational& s);

  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
  friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
  friend bool operator==(const Complex& a, const Complex& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
  friend bool operator!=(const Complex& a, const Complex& b) { return !(a == b); }

  Complex inverse() const;

  /// Exact square root when one exists in Q(i); nullopt otherwise.
  std::optional<Complex> sqrt() const;

  /// "p/q", "p/q*i", "a+b*i" style, never a float.
  std::string str() const;

 private:
  Rational re_{0};
  Rational im_{0};
};

/// Parses "3", "-2/5", "0.25", "1.5e-3" exactly.
Rational parse_rational(std::string_view text);

/// Exact square root of a non-negative rational, if it is a perfect square.
std::optional<Rational> rational_sqrt(const Rational& r);

std::string rational_str(const Rational& r);

}  // namespace fedosov
