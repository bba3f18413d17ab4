#include <set>

#include "doctest.h"
#include "invkit/predicate.hpp"
#include "support/random_expr.hpp"

using namespace invkit;

namespace {

PredExpr P(std::string_view text) { return parse_predicate(text); }

std::string roundtrip(std::string_view text) { return print_minimal(P(text)); }

Integer ev(std::string_view text, const Environment& env = {}) { return eval_expr(P(text), env); }

}  // namespace

TEST_CASE("parse: arithmetic precedence") {
  const auto e = P("5*x + 3*y == 300");
  const auto* eq = e->as<Binary>();
  REQUIRE(eq);
  CHECK(eq->op == BinaryOp::Eq);
  const auto* sum = eq->lhs->as<Binary>();
  REQUIRE(sum);
  CHECK(sum->op == BinaryOp::Add);
  CHECK(sum->lhs->as<Binary>()->op == BinaryOp::Mul);
  CHECK(sum->rhs->as<Binary>()->op == BinaryOp::Mul);
  CHECK(eq->rhs->as<IntLit>()->value == 300);
  CHECK(same_tree(P("x"), make_var("x")));
}

TEST_CASE("parse: == is left-associative like the C compiler") {
  // The host compiler is the reference parse: with a=2, b=2, c=1 the
  // left-nested reading gives 1, the right-nested reading gives 0.
  int a = 2, b = 2, c = 1;
#if defined(__GNUC__)
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wparentheses"
#endif
  const int compiled = a == b == c;
#if defined(__GNUC__)
#pragma GCC diagnostic pop
#endif
  Environment env{{"a", a}, {"b", b}, {"c", c}};
  CHECK(ev("a == b == c", env) == compiled);
  const auto* top = P("a == b == c")->as<Binary>();
  REQUIRE(top);
  CHECK(top->lhs->as<Binary>() != nullptr);
  CHECK(top->rhs->as<Var>() != nullptr);
}

TEST_CASE("parse: ternary, unary and casts") {
  CHECK(same_tree(P("a ? b : c ? d : e"),
                  make_ternary(make_var("a"), make_var("b"),
                               make_ternary(make_var("c"), make_var("d"), make_var("e")))));
  CHECK(same_tree(P("-x * y"), make_binary(BinaryOp::Mul, make_unary(UnaryOp::Neg, make_var("x")),
                                           make_var("y"))));
  CHECK(same_tree(P("(long long) a + b"),
                  make_binary(BinaryOp::Add, make_cast("long long", make_var("a")), make_var("b"))));
  CHECK(same_tree(P("(uint32_t) a"), make_cast("uint32_t", make_var("a"))));
  CHECK(same_tree(P("(x) - y"), make_binary(BinaryOp::Sub, make_var("x"), make_var("y"))));
  CHECK(same_tree(P("+x"), make_var("x")));
  CHECK(same_tree(P("true && false"),
                  make_binary(BinaryOp::And, make_bool(true), make_bool(false))));
  CHECK(P("0x1F")->as<IntLit>()->value == 31);
  CHECK(P("017")->as<IntLit>()->value == 15);
  CHECK(P("10UL")->as<IntLit>()->value == 10);
  CHECK(P("9223372036854775808")->as<IntLit>()->value == Integer("9223372036854775808"));
}

TEST_CASE("parse: errors") {
  CHECK_THROWS_AS(P(""), SyntaxError);
  CHECK_THROWS_AS(P("x +"), SyntaxError);
  CHECK_THROWS_AS(P("(x"), SyntaxError);
  CHECK_THROWS_AS(P("x y"), SyntaxError);
  CHECK_THROWS_AS(P("f(x)"), SyntaxError);
  CHECK_THROWS_AS(P("a[1]"), SyntaxError);
  CHECK_THROWS_AS(P("x & y"), SyntaxError);
  CHECK_THROWS_AS(P("x << 1"), SyntaxError);
  CHECK_THROWS_AS(P("~x"), SyntaxError);
  CHECK_THROWS_AS(P("1.5 < x"), SyntaxError);
  CHECK_THROWS_AS(P("while"), SyntaxError);
  CHECK_THROWS_AS(P("x += 1"), SideEffectError);
  CHECK_THROWS_AS(P("x++ < 3"), SideEffectError);
  CHECK_THROWS_AS(P("a = b == c"), SideEffectError);
  try {
    P("x + * y");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.position() == 4);
  }
}

TEST_CASE("print_minimal: spacing and parentheses") {
  CHECK(roundtrip("((5*x) + (3*y)) == 300") == "5*x + 3*y == 300");
  CHECK(roundtrip("(a + b) * c") == "(a + b) * c");
  CHECK(roundtrip("a - (b - c)") == "a - (b - c)");
  CHECK(roundtrip("(a - b) - c") == "a - b - c");
  CHECK(roundtrip("((36 <= y) && (36 <= x)) || ((21 <= y) && (45 <= x))") ==
        "36 <= y && 36 <= x || 21 <= y && 45 <= x");
  CHECK(roundtrip("!(a < b)") == "!(a < b)");
  CHECK(roundtrip("-(-x)") == "-(-x)");
  CHECK(roundtrip("(a ? b : c) + 1") == "(a ? b : c) + 1");
  CHECK(roundtrip("(a ? b : c) ? d : e") == "(a ? b : c) ? d : e");
  CHECK(roundtrip("((long long) x)") == "(long long) x");
  CHECK(roundtrip("(uint32_t) (-x)") == "(uint32_t) (-x)");
  CHECK(roundtrip("(int) -x") == "(int) -x");
  CHECK(print_minimal(make_binary(BinaryOp::Sub, make_var("a"), make_int(-3))) == "a - -3");
  CHECK(print_minimal(make_bool(true)) == "true");
  CHECK(print_minimal(make_bool(true), LiteralStyle::Integers) == "1");
}

TEST_CASE("eval_expr: C semantics") {
  CHECK(ev("5*x+3*y==300", {{"x", 0}, {"y", 100}}) == 1);
  CHECK(ev("false") == 0);
  CHECK(ev("-7 / 2") == -3);
  CHECK(ev("-7 % 2") == -1);
  CHECK(ev("7 % -2") == 1);
  CHECK(ev("3 && 4") == 1);
  CHECK(ev("0 || 5") == 1);
  CHECK(ev("0 && 1 / 0") == 0);  // short-circuit
  CHECK(ev("1 || 1 / 0") == 1);
  CHECK(ev("x ? 10 : 20", {{"x", 0}}) == 20);
  CHECK(ev("(long long) 5 * 2") == 10);
  CHECK_THROWS_AS(ev("1 / 0"), DivisionByZero);
  CHECK_THROWS_AS(ev("q"), UnboundVariable);

  // Truth table of (a && b) || c, written out by hand.
  const int expected[8] = {0, 1, 0, 1, 0, 1, 1, 1};  // index = a*4 + b*2 + c
  const auto e = P("(a && b) || c");
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        Environment env{{"a", a}, {"b", b}, {"c", c}};
        CHECK(eval_expr(e, env) == expected[a * 4 + b * 2 + c]);
      }
    }
  }
}

TEST_CASE("expr_metrics") {
  const auto m = expr_metrics(P("5*x + 3*y == 300"));
  CHECK(m.char_length == 16);
  CHECK(m.num_disjuncts == 1);
  CHECK(m.num_conjuncts == 1);
  CHECK(expr_metrics(P("a")) == ExprMetrics{1, 1, 1});
  const auto m2 = expr_metrics(P("a && b || c || d && e && f"));
  CHECK(m2.num_disjuncts == 3);
  CHECK(m2.num_conjuncts == 6);
}

TEST_CASE("check_no_side_effects") {
  CHECK_FALSE(check_no_side_effects("x += 1"));
  CHECK(check_no_side_effects("x == 1"));
  CHECK_FALSE(check_no_side_effects("a = b == c"));
  for (const char* op : {"++", "--", "+=", "-=", "=", "*=", "<<="}) {
    CHECK_FALSE(check_no_side_effects(std::string("x ") + op + " 1"));
  }
  for (const char* op : {"==", "<=", ">=", "!="}) {
    CHECK(check_no_side_effects(std::string("x ") + op + " 1"));
  }
  CHECK(check_no_side_effects("a @ b"));  // lexing leniently, no side effect
  CHECK_FALSE(check_no_side_effects("/* unterminated"));
}

TEST_CASE("free_variables and flatten") {
  CHECK(free_variables(P("y + x * y < z")) == std::vector<std::string>{"y", "x", "z"});
  CHECK(flatten_or(P("a || b || c && d")).size() == 3);
  CHECK(flatten_and(P("a && (b && c)")).size() == 3);
}

TEST_CASE("property: round trip and minimal parentheses") {
  testing::RandomExprGen gen(0x5eed);
  for (int i = 0; i < 300; ++i) {
    const auto e = gen.next();
    const auto text = print_minimal(e);
    const auto back = parse_predicate(text);
    INFO(text);
    REQUIRE(same_tree(e, back));
    if (i % 3 != 0) continue;
    for (const auto& [open, close] : testing::paren_pairs(text)) {
      std::string reduced = text;
      reduced.erase(close, 1);
      reduced.erase(open, 1);
      bool changed = true;
      try {
        changed = !same_tree(parse_predicate(reduced), e);
      } catch (const ParseError&) {
      }
      INFO(reduced);
      CHECK(changed);
    }
  }
}
