#include "invkit/predicate.hpp"

namespace invkit {

namespace {

Integer truth(bool b) { return b ? Integer(1) : Integer(0); }

struct Evaluator {
  const Environment& env;

  Integer operator()(const PredExpr& e) const {
    return std::visit([this](const auto& n) { return eval(n); }, e->node());
  }

  Integer eval(const IntLit& n) const { return n.value; }
  Integer eval(const BoolLit& n) const { return truth(n.value); }

  Integer eval(const Var& n) const {
    if (const Integer* v = env.find(n.name)) return *v;
    throw UnboundVariable(n.name);
  }

  Integer eval(const Cast& n) const { return (*this)(n.operand); }

  Integer eval(const Unary& n) const {
    Integer v = (*this)(n.operand);
    if (n.op == UnaryOp::Neg) return -v;
    return truth(v == 0);
  }

  Integer eval(const Binary& n) const {
    if (n.op == BinaryOp::And) {
      if ((*this)(n.lhs) == 0) return 0;
      return truth((*this)(n.rhs) != 0);
    }
    if (n.op == BinaryOp::Or) {
      if ((*this)(n.lhs) != 0) return 1;
      return truth((*this)(n.rhs) != 0);
    }
    const Integer a = (*this)(n.lhs);
    const Integer b = (*this)(n.rhs);
    switch (n.op) {
      case BinaryOp::Add: return a + b;
      case BinaryOp::Sub: return a - b;
      case BinaryOp::Mul: return a * b;
      case BinaryOp::Div:
        if (b == 0) throw DivisionByZero();
        return a / b;  // cpp_int truncates toward zero like C
      case BinaryOp::Mod:
        if (b == 0) throw DivisionByZero();
        return a % b;
      case BinaryOp::Lt: return truth(a < b);
      case BinaryOp::Le: return truth(a <= b);
      case BinaryOp::Gt: return truth(a > b);
      case BinaryOp::Ge: return truth(a >= b);
      case BinaryOp::Eq: return truth(a == b);
      case BinaryOp::Ne: return truth(a != b);
      case BinaryOp::And:
      case BinaryOp::Or: break;
    }
    return 0;
  }

  Integer eval(const Ternary& n) const {
    return (*this)(n.cond) != 0 ? (*this)(n.then_expr) : (*this)(n.else_expr);
  }
};

}  // namespace

Integer eval_expr(const PredExpr& expr, const Environment& env) { return Evaluator{env}(expr); }

}  // namespace invkit
