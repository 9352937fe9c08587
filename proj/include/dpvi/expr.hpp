#pragma once

// Arithmetic expressions used for exponents, weights, obstacles and
// multifunction endpoints in problem configurations.
//
// Grammar (recursive descent):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | name | name '(' args ')' | '(' expr ')'

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dpvi {

class ExprError : public std::runtime_error {
 public:
  ExprError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Variables an expression may reference. Spatial coordinates x, y, the
/// state value s and the frozen argument r of two-argument multifunctions.
enum class Var : int { x = 0, y = 1, s = 2, r = 3 };
inline constexpr std::size_t kNumVars = 4;

std::string_view var_name(Var v);

/// Variable values in the fixed order of `Var`.
struct Bindings {
  double values[kNumVars] = {0.0, 0.0, 0.0, 0.0};
  Bindings() = default;
  Bindings(double x, double y, double s = 0.0, double r = 0.0)
      : values{x, y, s, r} {}
};

/// Immutable parsed expression. Cheap to copy (shared tree).
class Expr {
 public:
  struct Node;

  Expr() = default;

  /// Evaluate with all four slots bound. Throws EvalError on domain errors.
  double eval(const Bindings& b) const;
  double operator()(double x, double y = 0.0, double s = 0.0,
                    double r = 0.0) const {
    return eval(Bindings{x, y, s, r});
  }

  /// Name-keyed evaluation; every variable used must be present.
  double eval(const std::map<std::string, double>& bindings) const;

  /// Fully parenthesized text that parses back to an equivalent tree.
  std::string to_string() const;

  /// Variables referenced anywhere in the tree.
  std::set<Var> variables() const;

  bool uses(Var v) const { return variables().count(v) != 0; }
  bool empty() const { return root_ == nullptr; }
  const std::string& source() const { return source_; }

 private:
  friend Expr parse_expression(std::string_view, const std::set<std::string>&);
  std::shared_ptr<const Node> root_;
  std::string source_;
};

/// Parse `text`; identifiers not in `allowed_vars` (a subset of
/// {x, y, s, r}) are rejected.
Expr parse_expression(std::string_view text,
                      const std::set<std::string>& allowed_vars);

/// Constant expression helper.
Expr constant_expression(double value);

}  // namespace dpvi
