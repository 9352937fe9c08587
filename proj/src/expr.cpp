#include "dpvi/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace dpvi {

namespace {

enum class Op {
  constant,
  variable,
  neg,
  add,
  sub,
  mul,
  div,
  pow,
  abs,
  min,
  max,
  exp,
  log,
  sin,
  cos,
  sqrt,
  sign
};

struct FunctionInfo {
  const char* name;
  Op op;
  int arity;
};

constexpr FunctionInfo kFunctions[] = {
    {"abs", Op::abs, 1},   {"min", Op::min, 2},   {"max", Op::max, 2},
    {"exp", Op::exp, 1},   {"log", Op::log, 1},   {"sin", Op::sin, 1},
    {"cos", Op::cos, 1},   {"sqrt", Op::sqrt, 1}, {"sign", Op::sign, 1},
};

const FunctionInfo* find_function(std::string_view name) {
  for (const auto& f : kFunctions)
    if (name == f.name) return &f;
  return nullptr;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

struct Expr::Node {
  Op op = Op::constant;
  double value = 0.0;
  Var var = Var::x;
  std::vector<std::shared_ptr<const Node>> args;
};

std::string_view var_name(Var v) {
  switch (v) {
    case Var::x: return "x";
    case Var::y: return "y";
    case Var::s: return "s";
    case Var::r: return "r";
  }
  return "?";
}

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make_node(Op op, std::vector<NodePtr> args) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->args = std::move(args);
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, const std::set<std::string>& allowed)
      : text_(text), allowed_(allowed) {}

  NodePtr parse() {
    skip_ws();
    if (pos_ >= text_.size()) throw ExprError("empty expression", pos_);
    NodePtr root = parse_expr();
    skip_ws();
    if (pos_ < text_.size())
      throw ExprError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return root;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (accept('+'))
        lhs = make_node(Op::add, {lhs, parse_term()});
      else if (accept('-'))
        lhs = make_node(Op::sub, {lhs, parse_term()});
      else
        return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*'))
        lhs = make_node(Op::mul, {lhs, parse_unary()});
      else if (accept('/'))
        lhs = make_node(Op::div, {lhs, parse_unary()});
      else
        return lhs;
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make_node(Op::neg, {parse_unary()});
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (accept('^')) return make_node(Op::pow, {base, parse_unary()});
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size())
      throw ExprError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_expr();
      if (!accept(')')) throw ExprError("expected ')'", position());
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return parse_identifier();
    throw ExprError(std::string("unexpected '") + c + "'", pos_);
  }

  std::size_t position() {
    skip_ws();
    return pos_;
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    std::string buf(text_.substr(start));
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (end == buf.c_str()) throw ExprError("malformed number", start);
    pos_ = start + static_cast<std::size_t>(end - buf.c_str());
    auto n = std::make_shared<Expr::Node>();
    n->op = Op::constant;
    n->value = v;
    return n;
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    skip_ws();
    const bool call = pos_ < text_.size() && text_[pos_] == '(';
    if (const FunctionInfo* fn = find_function(name)) {
      if (!call)
        throw ExprError("function '" + name + "' requires arguments", pos_);
      ++pos_;
      std::vector<NodePtr> args;
      if (!accept(')')) {
        args.push_back(parse_expr());
        while (accept(',')) args.push_back(parse_expr());
        if (!accept(')')) throw ExprError("expected ')'", position());
      }
      if (static_cast<int>(args.size()) != fn->arity)
        throw ExprError("function '" + name + "' expects " +
                            std::to_string(fn->arity) + " argument(s), got " +
                            std::to_string(args.size()),
                        start);
      return make_node(fn->op, std::move(args));
    }
    // A variable cannot be called; report the offending '('.
    if (call) throw ExprError("'" + name + "' is not a function", pos_);
    if (name == "pi") {
      auto n = std::make_shared<Expr::Node>();
      n->value = M_PI;
      return n;
    }
    if (allowed_.count(name) == 0)
      throw ExprError("unknown identifier '" + name + "'", start);
    auto n = std::make_shared<Expr::Node>();
    n->op = Op::variable;
    if (name == "x")
      n->var = Var::x;
    else if (name == "y")
      n->var = Var::y;
    else if (name == "s")
      n->var = Var::s;
    else if (name == "r")
      n->var = Var::r;
    else
      throw ExprError("unsupported variable '" + name + "'", start);
    return n;
  }

  std::string_view text_;
  const std::set<std::string>& allowed_;
  std::size_t pos_ = 0;
};

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw EvalError(std::string("domain error in ") + what);
  return v;
}

double eval_node(const Expr::Node& n, const Bindings& b) {
  switch (n.op) {
    case Op::constant: return n.value;
    case Op::variable: return b.values[static_cast<int>(n.var)];
    case Op::neg: return -eval_node(*n.args[0], b);
    case Op::add: return eval_node(*n.args[0], b) + eval_node(*n.args[1], b);
    case Op::sub: return eval_node(*n.args[0], b) - eval_node(*n.args[1], b);
    case Op::mul: return eval_node(*n.args[0], b) * eval_node(*n.args[1], b);
    case Op::div: {
      const double num = eval_node(*n.args[0], b);
      const double den = eval_node(*n.args[1], b);
      if (den == 0.0) throw EvalError("division by zero");
      return checked(num / den, "division");
    }
    case Op::pow: {
      const double base = eval_node(*n.args[0], b);
      const double ex = eval_node(*n.args[1], b);
      if (base == 0.0 && ex < 0.0) throw EvalError("zero to a negative power");
      return checked(std::pow(base, ex), "^");
    }
    case Op::abs: return std::fabs(eval_node(*n.args[0], b));
    case Op::min:
      return std::fmin(eval_node(*n.args[0], b), eval_node(*n.args[1], b));
    case Op::max:
      return std::fmax(eval_node(*n.args[0], b), eval_node(*n.args[1], b));
    case Op::exp: return checked(std::exp(eval_node(*n.args[0], b)), "exp");
    case Op::log: {
      const double a = eval_node(*n.args[0], b);
      if (!(a > 0.0)) throw EvalError("log of nonpositive value");
      return std::log(a);
    }
    case Op::sin: return std::sin(eval_node(*n.args[0], b));
    case Op::cos: return std::cos(eval_node(*n.args[0], b));
    case Op::sqrt: {
      const double a = eval_node(*n.args[0], b);
      if (a < 0.0) throw EvalError("sqrt of negative value");
      return std::sqrt(a);
    }
    case Op::sign: {
      const double a = eval_node(*n.args[0], b);
      return static_cast<double>((a > 0.0) - (a < 0.0));
    }
  }
  throw EvalError("corrupt expression tree");
}

const char* op_symbol(Op op) {
  switch (op) {
    case Op::add: return "+";
    case Op::sub: return "-";
    case Op::mul: return "*";
    case Op::div: return "/";
    case Op::pow: return "^";
    default: return "";
  }
}

void serialize(const Expr::Node& n, std::string& out) {
  switch (n.op) {
    case Op::constant:
      out += '(';
      out += format_number(n.value);
      out += ')';
      return;
    case Op::variable: out += var_name(n.var); return;
    case Op::neg:
      out += "(-";
      serialize(*n.args[0], out);
      out += ')';
      return;
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div:
    case Op::pow:
      out += '(';
      serialize(*n.args[0], out);
      out += op_symbol(n.op);
      serialize(*n.args[1], out);
      out += ')';
      return;
    default:
      for (const auto& f : kFunctions)
        if (f.op == n.op) out += f.name;
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ',';
        serialize(*n.args[i], out);
      }
      out += ')';
      return;
  }
}

void collect(const Expr::Node& n, std::set<Var>& vars) {
  if (n.op == Op::variable) vars.insert(n.var);
  for (const auto& a : n.args) collect(*a, vars);
}

}  // namespace

double Expr::eval(const Bindings& b) const {
  if (!root_) throw EvalError("empty expression");
  return checked(eval_node(*root_, b), "expression");
}

double Expr::eval(const std::map<std::string, double>& bindings) const {
  Bindings b;
  for (Var v : variables()) {
    auto it = bindings.find(std::string(var_name(v)));
    if (it == bindings.end())
      throw EvalError("unbound variable '" + std::string(var_name(v)) + "'");
    b.values[static_cast<int>(v)] = it->second;
  }
  return eval(b);
}

std::string Expr::to_string() const {
  std::string out;
  if (root_) serialize(*root_, out);
  return out;
}

std::set<Var> Expr::variables() const {
  std::set<Var> vars;
  if (root_) collect(*root_, vars);
  return vars;
}

Expr parse_expression(std::string_view text,
                      const std::set<std::string>& allowed_vars) {
  Parser parser(text, allowed_vars);
  Expr e;
  e.root_ = parser.parse();
  e.source_ = std::string(text);
  return e;
}

Expr constant_expression(double value) {
  return parse_expression(format_number(value), {});
}

}  // namespace dpvi
