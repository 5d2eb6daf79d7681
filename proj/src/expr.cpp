#include "walllaw/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace wl::expr {

namespace {

const char* const kFuncs[] = {"sin", "cos", "exp", "abs", "min", "max"};

int func_arity(const std::string& f) {
  if (f == "min" || f == "max") return 2;
  return 1;
}

bool is_func(const std::string& f) {
  for (const char* k : kFuncs)
    if (f == k) return true;
  return false;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    auto n = expr();
    skip_ws();
    if (pos_ != s_.size()) throw ParseError("trailing input", pos_);
    return n;
  }

 private:
  const std::string& s_;
  size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      if (eat('+'))
        lhs = binary(NodeKind::Add, std::move(lhs), term());
      else if (eat('-'))
        lhs = binary(NodeKind::Sub, std::move(lhs), term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    auto lhs = factor();
    for (;;) {
      if (eat('*'))
        lhs = binary(NodeKind::Mul, std::move(lhs), factor());
      else if (eat('/'))
        lhs = binary(NodeKind::Div, std::move(lhs), factor());
      else
        return lhs;
    }
  }

  NodePtr factor() {
    auto b = base();
    if (eat('^')) return binary(NodeKind::Pow, std::move(b), factor());
    return b;
  }

  NodePtr base() {
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    char c = s_[pos_];
    if (c == '-') {
      ++pos_;
      auto n = std::make_unique<Node>();
      n->kind = NodeKind::Neg;
      n->args.push_back(base());
      return n;
    }
    if (c == '(') {
      ++pos_;
      auto inner = expr();
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return ident();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr number() {
    size_t start = pos_;
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError("malformed number", start);
    pos_ += static_cast<size_t>(end - begin);
    auto n = std::make_unique<Node>();
    n->kind = NodeKind::Number;
    n->value = v;
    return n;
  }

  NodePtr ident() {
    size_t start = pos_;
    std::string name;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      name += s_[pos_++];
    if (name == "x" || name == "y") {
      auto n = std::make_unique<Node>();
      n->kind = NodeKind::Var;
      n->var = (name == "y") ? 1 : 0;
      return n;
    }
    if (is_func(name)) {
      if (!eat('(')) throw ParseError("expected '(' after function name", pos_);
      auto n = std::make_unique<Node>();
      n->kind = NodeKind::Call;
      n->func = name;
      n->args.push_back(expr());
      while (eat(',')) n->args.push_back(expr());
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      if (static_cast<int>(n->args.size()) != func_arity(name))
        throw ParseError("wrong argument count for " + name, start);
      return n;
    }
    throw ParseError("unknown identifier '" + name + "'", start);
  }

  static NodePtr binary(NodeKind k, NodePtr a, NodePtr b) {
    auto n = std::make_unique<Node>();
    n->kind = k;
    n->args.push_back(std::move(a));
    n->args.push_back(std::move(b));
    return n;
  }
};

double eval_node(const Node& n, double x, double y) {
  switch (n.kind) {
    case NodeKind::Number:
      return n.value;
    case NodeKind::Var:
      return n.var == 0 ? x : y;
    case NodeKind::Neg:
      return -eval_node(*n.args[0], x, y);
    case NodeKind::Add:
      return eval_node(*n.args[0], x, y) + eval_node(*n.args[1], x, y);
    case NodeKind::Sub:
      return eval_node(*n.args[0], x, y) - eval_node(*n.args[1], x, y);
    case NodeKind::Mul:
      return eval_node(*n.args[0], x, y) * eval_node(*n.args[1], x, y);
    case NodeKind::Div: {
      double d = eval_node(*n.args[1], x, y);
      if (d == 0.0) throw EvalError("division by zero");
      return eval_node(*n.args[0], x, y) / d;
    }
    case NodeKind::Pow: {
      double a = eval_node(*n.args[0], x, y);
      double b = eval_node(*n.args[1], x, y);
      if (a == 0.0 && b < 0.0) throw EvalError("zero raised to negative power");
      double r = std::pow(a, b);
      if (!std::isfinite(r)) throw EvalError("power out of domain");
      return r;
    }
    case NodeKind::Call: {
      double a = eval_node(*n.args[0], x, y);
      if (n.func == "sin") return std::sin(a);
      if (n.func == "cos") return std::cos(a);
      if (n.func == "exp") return std::exp(a);
      if (n.func == "abs") return std::fabs(a);
      double b = eval_node(*n.args[1], x, y);
      if (n.func == "min") return std::min(a, b);
      return std::max(a, b);
    }
  }
  throw EvalError("corrupt AST");
}

void print_node(const Node& n, std::ostringstream& out) {
  switch (n.kind) {
    case NodeKind::Number: {
      std::ostringstream tmp;
      tmp.precision(17);
      tmp << n.value;
      out << tmp.str();
      return;
    }
    case NodeKind::Var:
      out << (n.var == 0 ? "x" : "y");
      return;
    case NodeKind::Neg:
      out << "(-";
      print_node(*n.args[0], out);
      out << ")";
      return;
    case NodeKind::Add:
    case NodeKind::Sub:
    case NodeKind::Mul:
    case NodeKind::Div:
    case NodeKind::Pow: {
      char op = n.kind == NodeKind::Add   ? '+'
                : n.kind == NodeKind::Sub ? '-'
                : n.kind == NodeKind::Mul ? '*'
                : n.kind == NodeKind::Div ? '/'
                                          : '^';
      out << "(";
      print_node(*n.args[0], out);
      out << op;
      print_node(*n.args[1], out);
      out << ")";
      return;
    }
    case NodeKind::Call: {
      out << n.func << "(";
      for (size_t i = 0; i < n.args.size(); ++i) {
        if (i) out << ",";
        print_node(*n.args[i], out);
      }
      out << ")";
      return;
    }
  }
}

bool node_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Number:
      return a.value == b.value;
    case NodeKind::Var:
      return a.var == b.var;
    case NodeKind::Call:
      if (a.func != b.func) return false;
      break;
    default:
      break;
  }
  if (a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.args.size(); ++i)
    if (!node_equal(*a.args[i], *b.args[i])) return false;
  return true;
}

}  // namespace

ExprAst parse_expr(const std::string& text) {
  if (text.empty()) throw ParseError("empty input", 0);
  Parser p(text);
  return ExprAst(p.parse());
}

double evaluate(const ExprAst& ast, double x, double y) {
  if (!ast.root) throw EvalError("empty AST");
  if (!std::isfinite(x) || !std::isfinite(y)) throw EvalError("non-finite input");
  return eval_node(*ast.root, x, y);
}

std::string pretty_print(const ExprAst& ast) {
  std::ostringstream out;
  if (ast.root) print_node(*ast.root, out);
  return out.str();
}

bool ast_equal(const ExprAst& a, const ExprAst& b) {
  if (!a.root || !b.root) return a.root == b.root;
  return node_equal(*a.root, *b.root);
}

}  // namespace wl::expr
