#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "fedosov/jet.hpp"

namespace fedosov::expr {

enum class NodeKind { Number, ImaginaryUnit, Symbol, Negate, Add, Sub, Mul, Div, Pow, Apply };

/// Immutable expression tree.  Symbols are resolved only at elaboration.
struct Node {
  NodeKind kind;
  Rational number;                 // Number
  std::string name;                // Symbol, Apply
  unsigned exponent = 0;           // Pow
  std::vector<std::shared_ptr<const Node>> children;
};

using Ast = std::shared_ptr<const Node>;

Ast number(Rational value);
Ast imaginary_unit();
Ast symbol(std::string name);
Ast negate(Ast a);
Ast binary(NodeKind kind, Ast a, Ast b);
Ast pow(Ast base, unsigned exponent);
Ast apply(ElementaryFunction f, Ast arg);

/// Grammar:
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := "-" factor | atom ("^" integer)?
///   atom   := number | "i" | symbol | "(" expr ")" | func "(" expr ")"
///   func   := "exp" | "log" | "sqrt" | "sin" | "cos"
Ast parse(std::string_view source);

/// Fully parenthesized rendering that parse() maps back to an identical tree.
std::string to_string(const Ast& ast);

bool structurally_equal(const Ast& a, const Ast& b);

/// Expands the expression about the chart base point to the given order.
Jet elaborate(const Ast& ast, const ChartPtr& chart, int order);

inline Jet elaborate(std::string_view source, const ChartPtr& chart, int order) {
  return elaborate(parse(source), chart, order);
}

}  // namespace fedosov::expr
