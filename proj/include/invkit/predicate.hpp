#pragma once

// C boolean expressions used as invariant predicates: AST, parser, minimal
// printer, evaluator and size metrics.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "invkit/errors.hpp"
#include "invkit/lexer.hpp"

namespace invkit {

using Integer = boost::multiprecision::cpp_int;

enum class UnaryOp { Neg, LogNot };

enum class BinaryOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };

class Expr;

/// Immutable, shareable expression handle. Never null once produced by the
/// factories or the parser.
using PredExpr = std::shared_ptr<const Expr>;

struct IntLit {
  Integer value;
};
struct BoolLit {
  bool value;
};
struct Var {
  std::string name;
};
struct Cast {
  std::string type_name;  // e.g. "long long", "__int128"
  PredExpr operand;
};
struct Unary {
  UnaryOp op;
  PredExpr operand;
};
struct Binary {
  BinaryOp op;
  PredExpr lhs;
  PredExpr rhs;
};
struct Ternary {
  PredExpr cond;
  PredExpr then_expr;
  PredExpr else_expr;
};

class Expr {
 public:
  using Node = std::variant<IntLit, BoolLit, Var, Cast, Unary, Binary, Ternary>;

  explicit Expr(Node node) : node_(std::move(node)) {}

  const Node& node() const noexcept { return node_; }

  template <class T>
  const T* as() const noexcept {
    return std::get_if<T>(&node_);
  }

 private:
  Node node_;
};

PredExpr make_int(Integer value);
PredExpr make_bool(bool value);
PredExpr make_var(std::string name);
PredExpr make_cast(std::string type_name, PredExpr operand);
PredExpr make_unary(UnaryOp op, PredExpr operand);
PredExpr make_binary(BinaryOp op, PredExpr lhs, PredExpr rhs);
PredExpr make_ternary(PredExpr cond, PredExpr then_expr, PredExpr else_expr);

/// Deep structural comparison (pointer identity is not required).
bool same_tree(const PredExpr& a, const PredExpr& b);

std::string_view spelling(BinaryOp op);
std::string_view spelling(UnaryOp op);
bool is_relational(BinaryOp op);
bool is_logical(BinaryOp op);

/// Binding strength used by both the parser and the printer. Higher binds
/// tighter; 0 is the conditional operator.
int precedence(BinaryOp op);
inline constexpr int kTernaryPrecedence = 0;
inline constexpr int kUnaryPrecedence = 7;
inline constexpr int kAtomPrecedence = 8;

/// True for identifiers that may only appear inside a cast's type name.
bool is_type_keyword(std::string_view word);

/// Parses a whole predicate. Throws SideEffectError when the text contains an
/// assignment/increment/decrement operator anywhere and SyntaxError for any
/// other malformed or unsupported input.
PredExpr parse_predicate(std::string_view text);

/// Parses one conditional-expression starting at `pos` and advances `pos` past
/// it. Stops at the first token that cannot continue the expression. Used by
/// the mini-C front end to read conditions out of a program's token stream.
PredExpr parse_expression(std::span<const Token> tokens, std::size_t& pos);

enum class LiteralStyle {
  Keywords,  // true / false
  Integers,  // 1 / 0, for emission into plain C sources
};

/// C text with a parenthesis pair only where dropping it would change the
/// parse. Binary operators are surrounded by single spaces, except that `*`,
/// `/` and `%` are written tight when neither operand needs parentheses
/// ("5*x", but "(a + b) * c"). Unary operators take no following space.
std::string print_minimal(const PredExpr& expr, LiteralStyle style = LiteralStyle::Keywords);

/// Variable bindings for eval_expr. Small and flat: predicates rarely mention
/// more than a handful of variables.
class Environment {
 public:
  Environment() = default;
  Environment(std::initializer_list<std::pair<std::string, Integer>> init);

  void set(std::string_view name, Integer value);
  void erase(std::string_view name);
  const Integer* find(std::string_view name) const noexcept;
  bool contains(std::string_view name) const noexcept { return find(name) != nullptr; }
  const std::vector<std::pair<std::string, Integer>>& bindings() const noexcept { return slots_; }

 private:
  std::vector<std::pair<std::string, Integer>> slots_;
};

/// Evaluates with C-like integer semantics over unbounded integers: relational
/// and logical operators yield 0/1, && and || short-circuit, / truncates
/// toward zero, % takes the sign of the dividend, casts are the identity.
/// Throws UnboundVariable or DivisionByZero.
Integer eval_expr(const PredExpr& expr, const Environment& env);

struct ExprMetrics {
  std::size_t char_length = 0;
  std::size_t num_conjuncts = 0;
  std::size_t num_disjuncts = 0;

  bool operator==(const ExprMetrics&) const = default;
};

ExprMetrics expr_metrics(const PredExpr& expr);

/// Operands of the top-level || spine (left to right). A non-disjunction
/// yields a single element.
std::vector<PredExpr> flatten_or(const PredExpr& expr);
std::vector<PredExpr> flatten_and(const PredExpr& expr);

/// True iff the text contains no assignment, compound-assignment, increment or
/// decrement token. Comparison operators (==, <=, >=, !=) are fine.
bool check_no_side_effects(std::string_view text);

/// Collects the distinct variable names in first-occurrence order.
std::vector<std::string> free_variables(const PredExpr& expr);

}  // namespace invkit
