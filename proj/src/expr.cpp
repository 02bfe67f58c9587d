#include "fedosov/expr.hpp"

#include <cctype>

#include "fedosov/error.hpp"

namespace fedosov::expr {

namespace {

Ast make(Node n) { return std::make_shared<const Node>(std::move(n)); }

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Ast run() {
    Ast e = parse_expr();
    skip_space();
    if (pos_ != src_.size()) throw ParseError("unexpected '" + std::string(1, src_[pos_]) + "'", pos_);
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  Ast parse_expr() {
    Ast lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(NodeKind::Add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = binary(NodeKind::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  Ast parse_term() {
    Ast lhs = parse_factor();
    for (;;) {
      if (accept('*')) {
        lhs = binary(NodeKind::Mul, lhs, parse_factor());
      } else if (accept('/')) {
        lhs = binary(NodeKind::Div, lhs, parse_factor());
      } else {
        return lhs;
      }
    }
  }

  Ast parse_factor() {
    if (accept('-')) return negate(parse_factor());
    Ast base = parse_atom();
    if (accept('^')) {
      skip_space();
      const std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (start == pos_) throw ParseError("exponent must be a non-negative integer literal", start);
      const std::string digits(src_.substr(start, pos_ - start));
      if (digits.size() > 4) throw ParseError("exponent too large", start);
      return pow(base, static_cast<unsigned>(std::stoul(digits)));
    }
    return base;
  }

  Ast parse_atom() {
    skip_space();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Ast inner = parse_expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      std::string ident(src_.substr(start, pos_ - start));
      skip_space();
      if (pos_ < src_.size() && src_[pos_] == '(') {
        auto f = elementary_from_name(ident);
        if (!f) throw ParseError("unknown function '" + ident + "'", start);
        ++pos_;
        Ast arg = parse_expr();
        expect(')');
        return apply(*f, arg);
      }
      if (ident == "i") return imaginary_unit();
      return symbol(std::move(ident));
    }
    throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
  }

  Ast parse_number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    const std::string text(src_.substr(start, pos_ - start));
    if (text == ".") throw ParseError("malformed number", start);
    try {
      return number(parse_rational(text));
    } catch (const ParseError&) {
      throw ParseError("malformed number '" + text + "'", start);
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

Ast number(Rational value) {
  Node n{NodeKind::Number, {}, {}, 0, {}};
  n.number = std::move(value);
  return make(std::move(n));
}

Ast imaginary_unit() { return make(Node{NodeKind::ImaginaryUnit, {}, {}, 0, {}}); }

Ast symbol(std::string name) { return make(Node{NodeKind::Symbol, {}, std::move(name), 0, {}}); }

Ast negate(Ast a) { return make(Node{NodeKind::Negate, {}, {}, 0, {std::move(a)}}); }

Ast binary(NodeKind kind, Ast a, Ast b) { return make(Node{kind, {}, {}, 0, {std::move(a), std::move(b)}}); }

Ast pow(Ast base, unsigned exponent) { return make(Node{NodeKind::Pow, {}, {}, exponent, {std::move(base)}}); }

Ast apply(ElementaryFunction f, Ast arg) {
  return make(Node{NodeKind::Apply, {}, std::string(elementary_name(f)), 0, {std::move(arg)}});
}

Ast parse(std::string_view source) { return Parser(source).run(); }

std::string to_string(const Ast& ast) {
  switch (ast->kind) {
    case NodeKind::Number: {
      const Rational& r = ast->number;
      if (r.get_den() == 1) return r.get_num().get_str();
      return "(" + r.get_num().get_str() + "/" + r.get_den().get_str() + ")";
    }
    case NodeKind::ImaginaryUnit: return "i";
    case NodeKind::Symbol: return ast->name;
    case NodeKind::Negate: return "(-" + to_string(ast->children[0]) + ")";
    case NodeKind::Add: return "(" + to_string(ast->children[0]) + " + " + to_string(ast->children[1]) + ")";
    case NodeKind::Sub: return "(" + to_string(ast->children[0]) + " - " + to_string(ast->children[1]) + ")";
    case NodeKind::Mul: return "(" + to_string(ast->children[0]) + " * " + to_string(ast->children[1]) + ")";
    case NodeKind::Div: return "(" + to_string(ast->children[0]) + " / " + to_string(ast->children[1]) + ")";
    case NodeKind::Pow: return "(" + to_string(ast->children[0]) + "^" + std::to_string(ast->exponent) + ")";
    case NodeKind::Apply: return ast->name + "(" + to_string(ast->children[0]) + ")";
  }
  return "?";
}

bool structurally_equal(const Ast& a, const Ast& b) {
  if (a->kind != b->kind || a->children.size() != b->children.size()) return false;
  switch (a->kind) {
    case NodeKind::Number:
      if (a->number != b->number) return false;
      break;
    case NodeKind::Symbol:
    case NodeKind::Apply:
      if (a->name != b->name) return false;
      break;
    case NodeKind::Pow:
      if (a->exponent != b->exponent) return false;
      break;
    default: break;
  }
  for (std::size_t k = 0; k < a->children.size(); ++k) {
    if (!structurally_equal(a->children[k], b->children[k])) return false;
  }
  return true;
}

Jet elaborate(const Ast& ast, const ChartPtr& chart, int order) {
  switch (ast->kind) {
    case NodeKind::Number: return Jet::constant(chart, order, Complex(ast->number));
    case NodeKind::ImaginaryUnit: return Jet::constant(chart, order, Complex::i());
    case NodeKind::Symbol: {
      auto idx = chart->index_of(ast->name);
      if (!idx) throw DomainError("unknown symbol '" + ast->name + "'");
      return Jet::variable(chart, order, *idx);
    }
    case NodeKind::Negate: return -elaborate(ast->children[0], chart, order);
    case NodeKind::Add:
      return elaborate(ast->children[0], chart, order) + elaborate(ast->children[1], chart, order);
    case NodeKind::Sub:
      return elaborate(ast->children[0], chart, order) - elaborate(ast->children[1], chart, order);
    case NodeKind::Mul:
      return elaborate(ast->children[0], chart, order) * elaborate(ast->children[1], chart, order);
    case NodeKind::Div:
      return elaborate(ast->children[0], chart, order) * invert(elaborate(ast->children[1], chart, order));
    case NodeKind::Pow: return power(elaborate(ast->children[0], chart, order), ast->exponent);
    case NodeKind::Apply:
      return elementary(*elementary_from_name(ast->name), elaborate(ast->children[0], chart, order));
  }
  throw DomainError("malformed expression tree");
}

}  // namespace fedosov::expr
