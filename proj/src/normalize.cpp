#include "invkit/normalize.hpp"

namespace invkit {

std::size_t NormalizationReport::total_rewrites() const {
  std::size_t n = 0;
  for (const auto& [rule, count] : rules_fired) n += count;
  return n;
}

std::optional<Integer> literal_value(const Expr& e) {
  if (const auto* i = e.as<IntLit>()) return i->value;
  if (const auto* b = e.as<BoolLit>()) return Integer(b->value ? 1 : 0);
  if (const auto* u = e.as<Unary>(); u && u->op == UnaryOp::Neg) {
    if (const auto* i = u->operand->as<IntLit>()) return Integer(-i->value);
  }
  return std::nullopt;
}

bool is_boolean_valued(const Expr& e) {
  if (e.as<BoolLit>()) return true;
  if (const auto* i = e.as<IntLit>()) return i->value == 0 || i->value == 1;
  if (const auto* u = e.as<Unary>()) return u->op == UnaryOp::LogNot;
  if (const auto* b = e.as<Binary>()) return is_relational(b->op) || is_logical(b->op);
  if (const auto* c = e.as<Cast>()) return is_boolean_valued(*c->operand);
  if (const auto* t = e.as<Ternary>()) {
    return is_boolean_valued(*t->then_expr) && is_boolean_valued(*t->else_expr);
  }
  return false;
}

bool is_degenerate(const PredExpr& expr) { return literal_value(*expr).has_value(); }

namespace {

bool compare(BinaryOp op, const Integer& a, const Integer& b) {
  switch (op) {
    case BinaryOp::Lt: return a < b;
    case BinaryOp::Le: return a <= b;
    case BinaryOp::Gt: return a > b;
    case BinaryOp::Ge: return a >= b;
    case BinaryOp::Eq: return a == b;
    case BinaryOp::Ne: return a != b;
    default: return false;
  }
}

bool is_true_literal(const Expr& e) {
  auto v = literal_value(e);
  return v && *v != 0;
}

bool is_false_literal(const Expr& e) {
  auto v = literal_value(e);
  return v && *v == 0;
}

class Normalizer {
 public:
  explicit Normalizer(std::map<std::string, std::size_t>& fired) : fired_(fired) {}

  PredExpr rewrite(const PredExpr& e) {
    return std::visit([&](const auto& n) { return visit(e, n); }, e->node());
  }

 private:
  void fire(const char* rule) { ++fired_[rule]; }

  PredExpr visit(const PredExpr& self, const IntLit&) { return self; }
  PredExpr visit(const PredExpr& self, const BoolLit&) { return self; }
  PredExpr visit(const PredExpr& self, const Var&) { return self; }

  PredExpr visit(const PredExpr& self, const Cast& n) {
    PredExpr operand = rewrite(n.operand);
    if (operand == n.operand) return self;
    return make_cast(n.type_name, std::move(operand));
  }

  PredExpr visit(const PredExpr& self, const Unary& n) {
    PredExpr operand = rewrite(n.operand);
    if (n.op == UnaryOp::LogNot) {
      // Keep the literal's own spelling family so the text never grows.
      if (const auto* b = operand->as<BoolLit>()) {
        fire(rules::kNotConst);
        return make_bool(!b->value);
      }
      if (const auto* i = operand->as<IntLit>()) {
        fire(rules::kNotConst);
        return make_int(i->value == 0 ? 1 : 0);
      }
    }
    if (operand == n.operand) return self;
    return make_unary(n.op, std::move(operand));
  }

  PredExpr visit(const PredExpr& self, const Ternary& n) {
    PredExpr c = rewrite(n.cond);
    PredExpr t = rewrite(n.then_expr);
    PredExpr f = rewrite(n.else_expr);
    if (c == n.cond && t == n.then_expr && f == n.else_expr) return self;
    return make_ternary(std::move(c), std::move(t), std::move(f));
  }

  PredExpr visit(const PredExpr& self, const Binary& n) {
    PredExpr lhs = rewrite(n.lhs);
    PredExpr rhs = rewrite(n.rhs);

    if (is_relational(n.op)) {
      const auto a = literal_value(*lhs);
      const auto b = literal_value(*rhs);
      if (a && b) {
        fire(rules::kTautConst);
        return make_bool(compare(n.op, *a, *b));
      }
      if (same_tree(lhs, rhs)) {
        const bool holds = n.op == BinaryOp::Le || n.op == BinaryOp::Ge || n.op == BinaryOp::Eq;
        fire(holds ? rules::kTautRefl : rules::kContraRefl);
        return make_bool(holds);
      }
    } else if (n.op == BinaryOp::And) {
      if (is_true_literal(*rhs) && is_boolean_valued(*lhs)) {
        fire(rules::kTautConj);
        return lhs;
      }
      if (is_true_literal(*lhs) && is_boolean_valued(*rhs)) {
        fire(rules::kTautConj);
        return rhs;
      }
      if (is_false_literal(*rhs)) {
        fire(rules::kContraConj);
        return rhs;
      }
      if (is_false_literal(*lhs)) {
        fire(rules::kContraConj);
        return lhs;
      }
    } else if (n.op == BinaryOp::Or) {
      for (const PredExpr* side : {&lhs, &rhs}) {
        if (is_true_literal(**side)) {
          fire(rules::kTautDisj);
          // Only 1 has the right value; "5 || x" evaluates to 1, not 5.
          return *literal_value(**side) == 1 && is_boolean_valued(**side) ? *side : make_bool(true);
        }
      }
      if (is_false_literal(*rhs) && is_boolean_valued(*lhs)) {
        fire(rules::kContraDisj);
        return lhs;
      }
      if (is_false_literal(*lhs) && is_boolean_valued(*rhs)) {
        fire(rules::kContraDisj);
        return rhs;
      }
    }

    if (lhs == n.lhs && rhs == n.rhs) return self;
    return make_binary(n.op, std::move(lhs), std::move(rhs));
  }

  std::map<std::string, std::size_t>& fired_;
};

PredExpr strip(const PredExpr& e, std::size_t& count) {
  return std::visit(
      [&](const auto& n) -> PredExpr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Cast>) {
          ++count;
          return strip(n.operand, count);
        } else if constexpr (std::is_same_v<T, Unary>) {
          PredExpr o = strip(n.operand, count);
          return o == n.operand ? e : make_unary(n.op, std::move(o));
        } else if constexpr (std::is_same_v<T, Binary>) {
          PredExpr l = strip(n.lhs, count);
          PredExpr r = strip(n.rhs, count);
          return (l == n.lhs && r == n.rhs) ? e : make_binary(n.op, std::move(l), std::move(r));
        } else if constexpr (std::is_same_v<T, Ternary>) {
          PredExpr c = strip(n.cond, count);
          PredExpr t = strip(n.then_expr, count);
          PredExpr f = strip(n.else_expr, count);
          return (c == n.cond && t == n.then_expr && f == n.else_expr)
                     ? e
                     : make_ternary(std::move(c), std::move(t), std::move(f));
        } else {
          return e;
        }
      },
      e->node());
}

}  // namespace

Normalized normalize(const PredExpr& expr) {
  Normalized out;
  out.report.input_metrics = expr_metrics(expr);
  Normalizer normalizer(out.report.rules_fired);
  out.expr = normalizer.rewrite(expr);
  out.report.output_metrics = expr_metrics(out.expr);
  return out;
}

PredExpr strip_casts(const PredExpr& expr, std::size_t* stripped) {
  std::size_t count = 0;
  PredExpr out = strip(expr, count);
  if (stripped) *stripped = count;
  return out;
}

Normalized normalize_raw(const PredExpr& expr) {
  std::size_t casts = 0;
  PredExpr cast_free = strip_casts(expr, &casts);
  Normalized out = normalize(cast_free);
  out.report.input_metrics = expr_metrics(expr);
  out.report.casts_stripped = casts;
  return out;
}

}  // namespace invkit
