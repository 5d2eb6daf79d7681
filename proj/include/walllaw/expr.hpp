#pragma once

#include <memory>
#include <string>
#include <vector>

#include "walllaw/common.hpp"

namespace wl::expr {

// Small arithmetic expressions for boundary profiles h(x) and forcings
// f(x,y). Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' factor)?
//   base   := number | ident | ident '(' expr (',' expr)* ')'
//           | '(' expr ')' | '-' base
// Identifiers: variables x, y; calls sin, cos, exp, abs, min, max.

struct ParseError : Error {
  size_t offset;  // byte offset into the input
  ParseError(const std::string& msg, size_t off) : Error(msg), offset(off) {}
};

struct EvalError : Error {
  using Error::Error;
};

enum class NodeKind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

struct Node;
using NodePtr = std::unique_ptr<Node>;

struct Node {
  NodeKind kind;
  double value = 0.0;         // Number
  int var = 0;                // Var: 0 = x, 1 = y
  std::string func;           // Call
  std::vector<NodePtr> args;  // children
};

struct ExprAst {
  NodePtr root;
  ExprAst() = default;
  explicit ExprAst(NodePtr r) : root(std::move(r)) {}
};

ExprAst parse_expr(const std::string& text);
double evaluate(const ExprAst& ast, double x, double y = 0.0);
std::string pretty_print(const ExprAst& ast);
bool ast_equal(const ExprAst& a, const ExprAst& b);

}  // namespace wl::expr
