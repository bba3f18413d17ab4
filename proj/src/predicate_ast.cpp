#include <algorithm>

#include "invkit/predicate.hpp"

namespace invkit {

PredExpr make_int(Integer value) { return std::make_shared<const Expr>(IntLit{std::move(value)}); }
PredExpr make_bool(bool value) { return std::make_shared<const Expr>(BoolLit{value}); }
PredExpr make_var(std::string name) { return std::make_shared<const Expr>(Var{std::move(name)}); }

PredExpr make_cast(std::string type_name, PredExpr operand) {
  return std::make_shared<const Expr>(Cast{std::move(type_name), std::move(operand)});
}
PredExpr make_unary(UnaryOp op, PredExpr operand) {
  return std::make_shared<const Expr>(Unary{op, std::move(operand)});
}
PredExpr make_binary(BinaryOp op, PredExpr lhs, PredExpr rhs) {
  return std::make_shared<const Expr>(Binary{op, std::move(lhs), std::move(rhs)});
}
PredExpr make_ternary(PredExpr cond, PredExpr then_expr, PredExpr else_expr) {
  return std::make_shared<const Expr>(
      Ternary{std::move(cond), std::move(then_expr), std::move(else_expr)});
}

namespace {

struct SameTree {
  bool operator()(const IntLit& a, const IntLit& b) const { return a.value == b.value; }
  bool operator()(const BoolLit& a, const BoolLit& b) const { return a.value == b.value; }
  bool operator()(const Var& a, const Var& b) const { return a.name == b.name; }
  bool operator()(const Cast& a, const Cast& b) const {
    return a.type_name == b.type_name && same_tree(a.operand, b.operand);
  }
  bool operator()(const Unary& a, const Unary& b) const {
    return a.op == b.op && same_tree(a.operand, b.operand);
  }
  bool operator()(const Binary& a, const Binary& b) const {
    return a.op == b.op && same_tree(a.lhs, b.lhs) && same_tree(a.rhs, b.rhs);
  }
  bool operator()(const Ternary& a, const Ternary& b) const {
    return same_tree(a.cond, b.cond) && same_tree(a.then_expr, b.then_expr) &&
           same_tree(a.else_expr, b.else_expr);
  }
  template <class A, class B>
  bool operator()(const A&, const B&) const {
    return false;
  }
};

void collect_vars(const PredExpr& e, std::vector<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Var>) {
          if (std::find(out.begin(), out.end(), n.name) == out.end()) out.push_back(n.name);
        } else if constexpr (std::is_same_v<T, Cast> || std::is_same_v<T, Unary>) {
          collect_vars(n.operand, out);
        } else if constexpr (std::is_same_v<T, Binary>) {
          collect_vars(n.lhs, out);
          collect_vars(n.rhs, out);
        } else if constexpr (std::is_same_v<T, Ternary>) {
          collect_vars(n.cond, out);
          collect_vars(n.then_expr, out);
          collect_vars(n.else_expr, out);
        }
      },
      e->node());
}

}  // namespace

bool same_tree(const PredExpr& a, const PredExpr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return std::visit(SameTree{}, a->node(), b->node());
}

std::string_view spelling(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
  }
  return "?";
}

std::string_view spelling(UnaryOp op) { return op == UnaryOp::Neg ? "-" : "!"; }

bool is_relational(BinaryOp op) {
  switch (op) {
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge:
    case BinaryOp::Eq:
    case BinaryOp::Ne:
      return true;
    default:
      return false;
  }
}

bool is_logical(BinaryOp op) { return op == BinaryOp::And || op == BinaryOp::Or; }

int precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return 1;
    case BinaryOp::And: return 2;
    case BinaryOp::Eq:
    case BinaryOp::Ne: return 3;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 4;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 5;
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod: return 6;
  }
  return 0;
}

bool is_type_keyword(std::string_view word) {
  static constexpr std::string_view kWords[] = {
      "int",    "long",   "short",    "char",  "signed", "unsigned", "_Bool",
      "__int128", "float", "double", "const", "volatile", "bool"};
  for (auto w : kWords) {
    if (w == word) return true;
  }
  return false;
}

std::vector<PredExpr> flatten_or(const PredExpr& expr) {
  std::vector<PredExpr> out;
  auto walk = [&](auto&& self, const PredExpr& e) -> void {
    if (const auto* b = e->as<Binary>(); b && b->op == BinaryOp::Or) {
      self(self, b->lhs);
      self(self, b->rhs);
    } else {
      out.push_back(e);
    }
  };
  walk(walk, expr);
  return out;
}

std::vector<PredExpr> flatten_and(const PredExpr& expr) {
  std::vector<PredExpr> out;
  auto walk = [&](auto&& self, const PredExpr& e) -> void {
    if (const auto* b = e->as<Binary>(); b && b->op == BinaryOp::And) {
      self(self, b->lhs);
      self(self, b->rhs);
    } else {
      out.push_back(e);
    }
  };
  walk(walk, expr);
  return out;
}

ExprMetrics expr_metrics(const PredExpr& expr) {
  ExprMetrics m;
  m.char_length = print_minimal(expr).size();
  const auto disjuncts = flatten_or(expr);
  m.num_disjuncts = disjuncts.size();
  for (const auto& d : disjuncts) m.num_conjuncts += flatten_and(d).size();
  return m;
}

std::vector<std::string> free_variables(const PredExpr& expr) {
  std::vector<std::string> out;
  collect_vars(expr, out);
  return out;
}

Environment::Environment(std::initializer_list<std::pair<std::string, Integer>> init) {
  for (const auto& [name, value] : init) set(name, value);
}

void Environment::set(std::string_view name, Integer value) {
  for (auto& slot : slots_) {
    if (slot.first == name) {
      slot.second = std::move(value);
      return;
    }
  }
  slots_.emplace_back(std::string(name), std::move(value));
}

void Environment::erase(std::string_view name) {
  for (auto it = slots_.begin(); it != slots_.end(); ++it) {
    if (it->first == name) {
      slots_.erase(it);
      return;
    }
  }
}

const Integer* Environment::find(std::string_view name) const noexcept {
  for (const auto& slot : slots_) {
    if (slot.first == name) return &slot.second;
  }
  return nullptr;
}

}  // namespace invkit
