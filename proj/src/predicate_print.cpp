#include "invkit/predicate.hpp"

namespace invkit {

namespace {

int node_precedence(const Expr& e) {
  return std::visit(
      [](const auto& n) -> int {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Binary>) {
          return precedence(n.op);
        } else if constexpr (std::is_same_v<T, Ternary>) {
          return kTernaryPrecedence;
        } else if constexpr (std::is_same_v<T, Unary> || std::is_same_v<T, Cast>) {
          return kUnaryPrecedence;
        } else if constexpr (std::is_same_v<T, IntLit>) {
          return n.value < 0 ? kUnaryPrecedence : kAtomPrecedence;
        } else {
          return kAtomPrecedence;
        }
      },
      e.node());
}

bool keyword_type(std::string_view type_name) {
  std::size_t start = 0;
  while (start < type_name.size()) {
    auto end = type_name.find(' ', start);
    if (end == std::string_view::npos) end = type_name.size();
    if (!is_type_keyword(type_name.substr(start, end - start))) return false;
    start = end + 1;
  }
  return true;
}

bool starts_with_minus(const Expr& e) {
  if (const auto* u = e.as<Unary>()) return u->op == UnaryOp::Neg;
  if (const auto* lit = e.as<IntLit>()) return lit->value < 0;
  return false;
}

class Printer {
 public:
  explicit Printer(LiteralStyle style) : style_(style) {}

  void print(const Expr& e, std::string& out) const {
    std::visit([&](const auto& n) { emit(n, out); }, e.node());
  }

 private:
  void child(const Expr& e, bool parens, std::string& out) const {
    if (parens) out += '(';
    print(e, out);
    if (parens) out += ')';
  }

  void emit(const IntLit& n, std::string& out) const { out += n.value.str(); }

  void emit(const BoolLit& n, std::string& out) const {
    if (style_ == LiteralStyle::Integers) {
      out += n.value ? "1" : "0";
    } else {
      out += n.value ? "true" : "false";
    }
  }

  void emit(const Var& n, std::string& out) const { out += n.name; }

  void emit(const Cast& n, std::string& out) const {
    out += '(';
    out += n.type_name;
    out += ") ";
    // An unknown type name followed by '-' would read back as a subtraction.
    const bool parens = node_precedence(*n.operand) < kUnaryPrecedence ||
                        (!keyword_type(n.type_name) && starts_with_minus(*n.operand));
    child(*n.operand, parens, out);
  }

  void emit(const Unary& n, std::string& out) const {
    out += spelling(n.op);
    // "--x" would lex as a decrement, so a nested negation keeps its parens.
    const bool parens = node_precedence(*n.operand) < kUnaryPrecedence ||
                        (n.op == UnaryOp::Neg && starts_with_minus(*n.operand));
    child(*n.operand, parens, out);
  }

  void emit(const Binary& n, std::string& out) const {
    const int prec = precedence(n.op);
    const bool lhs_parens = node_precedence(*n.lhs) < prec;
    const bool rhs_parens = node_precedence(*n.rhs) <= prec;
    // "5*x" but "(a + b) * c": multiplicative operators hug bare operands only.
    const bool tight = (n.op == BinaryOp::Mul || n.op == BinaryOp::Div || n.op == BinaryOp::Mod) &&
                       !lhs_parens && !rhs_parens;
    child(*n.lhs, lhs_parens, out);
    if (!tight) out += ' ';
    out += spelling(n.op);
    if (!tight) out += ' ';
    child(*n.rhs, rhs_parens, out);
  }

  void emit(const Ternary& n, std::string& out) const {
    // The condition is a logical-or-expression; the branches accept any
    // conditional-expression (the else branch is right-associative).
    child(*n.cond, node_precedence(*n.cond) <= kTernaryPrecedence, out);
    out += " ? ";
    print(*n.then_expr, out);
    out += " : ";
    print(*n.else_expr, out);
  }

  LiteralStyle style_;
};

}  // namespace

std::string print_minimal(const PredExpr& expr, LiteralStyle style) {
  std::string out;
  Printer(style).print(*expr, out);
  return out;
}

}  // namespace invkit
