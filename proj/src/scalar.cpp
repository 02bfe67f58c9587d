#include "fedosov/scalar.hpp"

#include <cctype>

#include "fedosov/error.hpp"

namespace fedosov {

namespace {

// Scratch value reused by the fused multiply-add paths.
thread_local Rational t_scratch;

}  // namespace

Complex& Complex::operator+=(const Complex& o) {
  if (sgn(o.re_) != 0) re_ += o.re_;
  if (sgn(o.im_) != 0) im_ += o.im_;
  return *this;
}

Complex& Complex::operator-=(const Complex& o) {
  if (sgn(o.re_) != 0) re_ -= o.re_;
  if (sgn(o.im_) != 0) im_ -= o.im_;
  return *this;
}

Complex& Complex::operator*=(const Complex& o) {
  if (o.is_real()) {
    re_ *= o.re_;
    im_ *= o.re_;
    return *this;
  }
  if (is_real()) {
    im_ = re_ * o.im_;
    re_ *= o.re_;
    return *this;
  }
  Rational re = re_ * o.re_ - im_ * o.im_;
  Rational im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

Complex& Complex::operator/=(const Complex& o) { return *this *= o.inverse(); }

void Complex::add_product(const Complex& a, const Complex& b) {
  Rational& t = t_scratch;
  const bool ar = sgn(a.re_) != 0, ai = sgn(a.im_) != 0;
  const bool br = sgn(b.re_) != 0, bi = sgn(b.im_) != 0;
  if (ar && br) {
    mpq_mul(t.get_mpq_t(), a.re_.get_mpq_t(), b.re_.get_mpq_t());
    mpq_add(re_.get_mpq_t(), re_.get_mpq_t(), t.get_mpq_t());
  }
  if (ai && bi) {
    mpq_mul(t.get_mpq_t(), a.im_.get_mpq_t(), b.im_.get_mpq_t());
    mpq_sub(re_.get_mpq_t(), re_.get_mpq_t(), t.get_mpq_t());
  }
  if (ar && bi) {
    mpq_mul(t.get_mpq_t(), a.re_.get_mpq_t(), b.im_.get_mpq_t());
    mpq_add(im_.get_mpq_t(), im_.get_mpq_t(), t.get_mpq_t());
  }
  if (ai && br) {
    mpq_mul(t.get_mpq_t(), a.im_.get_mpq_t(), b.re_.get_mpq_t());
    mpq_add(im_.get_mpq_t(), im_.get_mpq_t(), t.get_mpq_t());
  }
}

void Complex::add_scaled(const Complex& a, const Rational& s) {
  Rational& t = t_scratch;
  if (sgn(a.re_) != 0) {
    mpq_mul(t.get_mpq_t(), a.re_.get_mpq_t(), s.get_mpq_t());
    mpq_add(re_.get_mpq_t(), re_.get_mpq_t(), t.get_mpq_t());
  }
  if (sgn(a.im_) != 0) {
    mpq_mul(t.get_mpq_t(), a.im_.get_mpq_t(), s.get_mpq_t());
    mpq_add(im_.get_mpq_t(), im_.get_mpq_t(), t.get_mpq_t());
  }
}

Complex Complex::inverse() const {
  if (is_zero()) throw DomainError("division by zero");
  if (is_real()) return Complex(Rational(1) / re_);
  Rational n = re_ * re_ + im_ * im_;
  return Complex(re_ / n, -im_ / n);
}

std::optional<Rational> rational_sqrt(const Rational& r) {
  if (sgn(r) < 0) return std::nullopt;
  if (sgn(r) == 0) return Rational(0);
  mpz_class num = r.get_num(), den = r.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t())) {
    return std::nullopt;
  }
  mpz_class sn, sd;
  mpz_sqrt(sn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(sd.get_mpz_t(), den.get_mpz_t());
  Rational out(sn, sd);
  out.canonicalize();
  return out;
}

std::optional<Complex> Complex::sqrt() const {
  if (is_real()) {
    if (sgn(re_) >= 0) {
      if (auto s = rational_sqrt(re_)) return Complex(*s);
      return std::nullopt;
    }
    if (auto s = rational_sqrt(-re_)) return Complex(Rational(0), *s);
    return std::nullopt;
  }
  // (x + iy)^2 = a + ib  =>  x^2 = (a + |c|)/2, y = b/(2x).
  auto modulus = rational_sqrt(re_ * re_ + im_ * im_);
  if (!modulus) return std::nullopt;
  auto x = rational_sqrt((re_ + *modulus) / 2);
  if (!x || sgn(*x) == 0) return std::nullopt;
  return Complex(*x, im_ / (2 * *x));
}

std::string rational_str(const Rational& r) { return r.get_str(); }

std::string Complex::str() const {
  if (is_real()) return rational_str(re_);
  std::string im_part;
  if (im_ == 1) {
    im_part = "i";
  } else if (im_ == -1) {
    im_part = "-i";
  } else {
    im_part = rational_str(im_) + "*i";
  }
  if (sgn(re_) == 0) return im_part;
  if (sgn(im_) > 0) return rational_str(re_) + "+" + im_part;
  return rational_str(re_) + im_part;
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto fail = [&]() -> Rational { throw ParseError("invalid rational literal '" + s + "'", 0); };
  if (s.empty()) return fail();
  if (s.find('/') != std::string::npos) {
    Rational r;
    if (r.set_str(s, 10) != 0 || sgn(r.get_den()) == 0) return fail();
    r.canonicalize();
    return r;
  }
  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
  mpz_class digits = 0;
  long scale = 0;
  bool any = false, dot = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits = digits * 10 + (c - '0');
      if (dot) --scale;
      any = true;
    } else if (c == '.' && !dot) {
      dot = true;
    } else {
      break;
    }
  }
  if (!any) return fail();
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') return fail();
    try {
      std::size_t used = 0;
      long e = std::stol(s.substr(pos + 1), &used);
      if (used != s.size() - pos - 1) return fail();
      scale += e;
    } catch (const std::exception&) {
      return fail();
    }
  }
  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  Rational r = scale >= 0 ? Rational(digits * ten_pow) : Rational(digits, ten_pow);
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

}  // namespace fedosov
