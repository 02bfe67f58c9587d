#include "doctest.h"
#include "fedosov/error.hpp"
#include "fedosov/expr.hpp"
#include "support.hpp"

using namespace fedosov;
using namespace fedosov::expr;

namespace {

ChartPtr qp() { return make_chart({"q", "p"}, {Complex(0), Complex(0)}); }

Ast random_ast(testing::Gen& gen, int depth) {
  if (depth == 0 || gen.coin(0.3)) {
    switch (gen.integer(0, 3)) {
      case 0: return number(Rational(gen.integer(0, 5)));
      case 1: return imaginary_unit();
      case 2: return symbol("q");
      default: return symbol("p");
    }
  }
  switch (gen.integer(0, 5)) {
    case 0: return negate(random_ast(gen, depth - 1));
    case 1: return pow(random_ast(gen, depth - 1), static_cast<unsigned>(gen.integer(0, 3)));
    case 2: return binary(NodeKind::Add, random_ast(gen, depth - 1), random_ast(gen, depth - 1));
    case 3: return binary(NodeKind::Sub, random_ast(gen, depth - 1), random_ast(gen, depth - 1));
    case 4: return binary(NodeKind::Mul, random_ast(gen, depth - 1), random_ast(gen, depth - 1));
    default: return apply(ElementaryFunction::Sin, random_ast(gen, depth - 1));
  }
}

}  // namespace

TEST_CASE("precedence and associativity") {
  CHECK(structurally_equal(parse("q^2 + 2*p"),
                           binary(NodeKind::Add, pow(symbol("q"), 2), binary(NodeKind::Mul, number(2), symbol("p")))));
  CHECK(structurally_equal(parse("1/(1+q)"),
                           binary(NodeKind::Div, number(1), binary(NodeKind::Add, number(1), symbol("q")))));
  CHECK(structurally_equal(parse("exp(i*z)"),
                           apply(ElementaryFunction::Exp, binary(NodeKind::Mul, imaginary_unit(), symbol("z")))));
  CHECK(structurally_equal(parse("a-b-c"),
                           binary(NodeKind::Sub, binary(NodeKind::Sub, symbol("a"), symbol("b")), symbol("c"))));
  CHECK(structurally_equal(parse("-q^2"), negate(pow(symbol("q"), 2))));
  CHECK(structurally_equal(parse("0.25"), number(Rational(1, 4))));
}

TEST_CASE("parse errors carry positions") {
  try {
    parse("q + * p");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 4);
  }
  CHECK_THROWS_AS(parse("tan(q)"), ParseError);
  CHECK_THROWS_AS(parse("(q"), ParseError);
  CHECK_THROWS_AS(parse("q^p"), ParseError);
  CHECK_THROWS_AS(parse("q p"), ParseError);
}

TEST_CASE("elaboration") {
  auto c = qp();
  Jet j = elaborate("q*p", c, 3);
  CHECK(j.size() == 1);
  CHECK(j.coeff(Monomial::unit(0) + Monomial::unit(1)) == Complex(1));

  Jet g = elaborate("1/(1-q)", c, 4);
  for (unsigned k = 0; k <= 4; ++k) CHECK(g.coeff(Monomial::unit(0, k)) == Complex(1));

  Jet e = elaborate("exp(i*q)", c, 4);
  Complex ik(1);
  Rational fact(1);
  for (unsigned k = 0; k <= 4; ++k) {
    if (k > 0) {
      ik *= Complex::i();
      fact *= static_cast<long>(k);
    }
    CHECK(e.coeff(Monomial::unit(0, k)) == ik * Complex(Rational(1) / fact));
  }
  CHECK_THROWS_AS(elaborate("x + 1", c, 2), DomainError);
  CHECK_THROWS_AS(elaborate("1/q", c, 2), DomainError);
}

TEST_CASE("elaboration about a nonzero base point") {
  auto c = make_chart({"x"}, {Complex(Rational(1, 2))});
  Jet j = elaborate("x^2", c, 3);
  // (1/2 + t)^2 = 1/4 + t + t^2
  CHECK(j.coeff(Monomial()) == Complex(Rational(1, 4)));
  CHECK(j.coeff(Monomial::unit(0)) == Complex(1));
  CHECK(j.coeff(Monomial::unit(0, 2)) == Complex(1));
}

TEST_CASE("round trip and homomorphism on random trees") {
  testing::Gen gen(77);
  auto c = qp();
  for (int t = 0; t < 50; ++t) {
    Ast a = random_ast(gen, 4);
    Ast b = random_ast(gen, 3);
    CHECK(structurally_equal(parse(to_string(a)), a));
    try {
      Jet ja = elaborate(a, c, 4), jb = elaborate(b, c, 4);
      CHECK(agree(elaborate(binary(NodeKind::Add, a, b), c, 4), ja + jb));
      CHECK(agree(elaborate(binary(NodeKind::Mul, a, b), c, 4), ja * jb));
    } catch (const DomainError&) {
      // sin of an argument with a nonzero constant term has no exact expansion
    }
  }
}
