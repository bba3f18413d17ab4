#include "invkit/minic.hpp"

#include <chrono>
#include <memory>
#include <optional>

#include "invkit/normalize.hpp"

namespace invkit {

namespace {

// ---------------------------------------------------------------------------
// Syntax

struct NondetSpec {
  std::string function;
  std::optional<Integer> lo;
  std::optional<Integer> hi;
};

struct RValue {
  PredExpr expr;
  std::optional<NondetSpec> nondet;

  bool present() const { return expr || nondet; }
};

enum class Kind {
  Block, Decl, Assign, Assume, Assert, Error, Abort,
  If, While, DoWhile, For, Break, Continue, Return, Nop,
};

struct Declarator {
  std::string name;
  RValue init;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Stmt {
  Kind kind = Kind::Nop;
  std::size_t line = 0;
  std::vector<StmtPtr> body;       // Block
  std::vector<Declarator> decls;   // Decl
  std::string target;              // Assign
  std::optional<BinaryOp> op;      // Assign: compound operator, if any
  RValue value;                    // Assign
  RValue cond;                     // If, loops (absent = true), Assume, Assert
  StmtPtr then_s, else_s;          // If; loop body in then_s
  StmtPtr init, step;              // For
};

StmtPtr make_stmt(Kind kind, std::size_t line) {
  auto s = std::make_unique<Stmt>();
  s->kind = kind;
  s->line = line;
  return s;
}

NondetSpec nondet_spec(std::string function) {
  NondetSpec spec{std::move(function), std::nullopt, std::nullopt};
  const std::string_view suffix = std::string_view(spec.function).substr(18);
  if (suffix == "bool") {
    spec.lo = 0;
    spec.hi = 1;
  } else if (suffix == "char") {
    spec.lo = -128;
    spec.hi = 127;
  } else if (suffix == "uchar") {
    spec.lo = 0;
    spec.hi = 255;
  }
  return spec;
}

bool is_nondet_function(std::string_view name) {
  return name.size() > 18 && name.substr(0, 18) == "__VERIFIER_nondet_";
}

bool is_storage_word(std::string_view w) {
  return w == "extern" || w == "static" || w == "const" || w == "volatile" || w == "register" ||
         w == "inline" || w == "void";
}

struct Unit {
  std::vector<StmtPtr> globals;
  StmtPtr main_body;
};

class Parser {
 public:
  explicit Parser(std::string_view source) {
    LexOptions options;
    options.skip_directives = true;
    try {
      toks_ = tokenize(source, options);
    } catch (const SyntaxError& e) {
      throw UnsupportedConstruct(std::string("lexical error: ") + e.what(), 0);
    }
  }

  Unit parse_unit() {
    Unit unit;
    while (peek().kind != TokenKind::End) {
      if (accept(";")) continue;
      if (peek().is_identifier("typedef")) {
        skip_past(";");
        continue;
      }
      if (!at_type_start()) unsupported("unsupported top-level construct " + describe(peek()));
      const std::size_t line = peek().line;
      specifiers();
      if (peek().is("*")) unsupported("pointer declarations are not supported");
      const std::string name = identifier();
      if (peek().is("(")) {
        skip_balanced("(", ")");
        if (accept(";")) continue;
        if (!peek().is("{")) unsupported("expected function body");
        if (name == "main") {
          unit.main_body = block();
        } else {
          skip_balanced("{", "}");
        }
        continue;
      }
      unit.globals.push_back(declaration_rest(name, line));
    }
    if (!unit.main_body) throw UnsupportedConstruct("no main function", 0);
    return unit;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& advance() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool accept(std::string_view punct) {
    if (!peek().is(punct)) return false;
    advance();
    return true;
  }
  void expect(std::string_view punct) {
    if (!accept(punct)) unsupported("expected '" + std::string(punct) + "' but found " + describe(peek()));
  }
  static std::string describe(const Token& t) {
    return t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
  }
  [[noreturn]] void unsupported(const std::string& what) const {
    throw UnsupportedConstruct(what, peek().line);
  }
  std::string identifier() {
    if (peek().kind != TokenKind::Identifier) unsupported("expected identifier, found " + describe(peek()));
    return advance().text;
  }

  bool at_type_start() const {
    const Token& t = peek();
    return t.kind == TokenKind::Identifier && (is_type_keyword(t.text) || is_storage_word(t.text));
  }
  void specifiers() {
    while (at_type_start()) advance();
  }

  void skip_balanced(std::string_view open, std::string_view close) {
    int depth = 0;
    do {
      if (peek().kind == TokenKind::End) unsupported("unbalanced '" + std::string(open) + "'");
      if (peek().is(open)) ++depth;
      if (peek().is(close)) --depth;
      advance();
    } while (depth > 0);
  }
  void skip_past(std::string_view punct) {
    while (peek().kind != TokenKind::End && !peek().is(punct)) {
      if (peek().is("{")) {
        skip_balanced("{", "}");
      } else {
        advance();
      }
    }
    expect(punct);
  }

  PredExpr expression() {
    try {
      return parse_expression(toks_, pos_);
    } catch (const ParseError& e) {
      throw UnsupportedConstruct(e.what(), peek().line);
    }
  }

  RValue rvalue() {
    RValue v;
    if (peek().kind == TokenKind::Identifier && is_nondet_function(peek().text) && peek(1).is("(") &&
        peek(2).is(")")) {
      v.nondet = nondet_spec(advance().text);
      advance();
      advance();
      return v;
    }
    v.expr = expression();
    return v;
  }

  RValue parenthesized() {
    expect("(");
    RValue v = rvalue();
    expect(")");
    return v;
  }

  StmtPtr block() {
    auto s = make_stmt(Kind::Block, peek().line);
    expect("{");
    while (!peek().is("}")) {
      if (peek().kind == TokenKind::End) unsupported("unterminated block");
      s->body.push_back(statement());
    }
    advance();
    infer_ranges(s->body);
    return s;
  }

  StmtPtr declaration_rest(std::string name, std::size_t line) {
    auto s = make_stmt(Kind::Decl, line);
    for (;;) {
      if (peek().is("[")) unsupported("arrays are not supported");
      Declarator d{std::move(name), {}};
      if (accept("=")) d.init = rvalue();
      s->decls.push_back(std::move(d));
      if (!accept(",")) break;
      if (peek().is("*")) unsupported("pointer declarations are not supported");
      name = identifier();
    }
    expect(";");
    return s;
  }

  StmtPtr statement() {
    const Token& tok = peek();
    const std::size_t line = tok.line;
    if (tok.is("{")) return block();
    if (accept(";")) return make_stmt(Kind::Nop, line);
    if (tok.is("++") || tok.is("--")) return simple(";");
    if (tok.kind != TokenKind::Identifier) unsupported("unexpected " + describe(tok));

    if (tok.text == "if") {
      advance();
      auto s = make_stmt(Kind::If, line);
      s->cond = parenthesized();
      s->then_s = statement();
      if (peek().is_identifier("else")) {
        advance();
        s->else_s = statement();
      }
      return s;
    }
    if (tok.text == "while") {
      advance();
      auto s = make_stmt(Kind::While, line);
      s->cond = parenthesized();
      s->then_s = statement();
      return s;
    }
    if (tok.text == "do") {
      advance();
      auto s = make_stmt(Kind::DoWhile, line);
      s->then_s = statement();
      if (!peek().is_identifier("while")) unsupported("expected 'while' after do-body");
      advance();
      s->cond = parenthesized();
      expect(";");
      return s;
    }
    if (tok.text == "for") {
      advance();
      auto s = make_stmt(Kind::For, line);
      expect("(");
      if (!accept(";")) {
        if (at_type_start()) {
          const std::size_t init_line = peek().line;
          specifiers();
          s->init = declaration_rest(identifier(), init_line);
        } else {
          s->init = simple(";");
        }
      }
      if (!accept(";")) {
        s->cond = rvalue();
        expect(";");
      }
      if (!accept(")")) s->step = simple(")");
      s->then_s = statement();
      return s;
    }
    if (tok.text == "break" || tok.text == "continue") {
      advance();
      expect(";");
      return make_stmt(tok.text == "break" ? Kind::Break : Kind::Continue, line);
    }
    if (tok.text == "return") {
      advance();
      while (!peek().is(";")) {
        if (peek().kind == TokenKind::End) unsupported("unterminated return");
        advance();
      }
      advance();
      return make_stmt(Kind::Return, line);
    }
    if (tok.text == "goto" || tok.text == "switch") unsupported("'" + tok.text + "' is not supported");
    if (at_type_start()) {
      specifiers();
      if (peek().is("*")) unsupported("pointer declarations are not supported");
      std::string name = identifier();
      if (peek().is("(")) unsupported("local function declarations are not supported");
      return declaration_rest(std::move(name), line);
    }
    if (peek(1).is(":")) {
      advance();
      advance();
      return statement();
    }
    return simple(";");
  }

  StmtPtr increment(std::string target, bool up, std::size_t line) {
    auto s = make_stmt(Kind::Assign, line);
    s->target = std::move(target);
    s->op = up ? BinaryOp::Add : BinaryOp::Sub;
    s->value.expr = make_int(1);
    return s;
  }

  // Assignment, increment or call, followed by `terminator`.
  StmtPtr simple(std::string_view terminator) {
    const std::size_t line = peek().line;
    StmtPtr s;
    if (peek().is("++") || peek().is("--")) {
      const bool up = advance().text == "++";
      s = increment(identifier(), up, line);
    } else {
      const std::string name = identifier();
      if (peek().is("(")) {
        s = call(name, line);
      } else if (peek().is("++") || peek().is("--")) {
        s = increment(name, advance().text == "++", line);
      } else {
        static const std::pair<std::string_view, BinaryOp> kCompound[] = {
            {"+=", BinaryOp::Add}, {"-=", BinaryOp::Sub}, {"*=", BinaryOp::Mul},
            {"/=", BinaryOp::Div}, {"%=", BinaryOp::Mod}};
        s = make_stmt(Kind::Assign, line);
        s->target = name;
        if (!accept("=")) {
          for (const auto& [punct, op] : kCompound) {
            if (accept(punct)) {
              s->op = op;
              break;
            }
          }
          if (!s->op) unsupported("unsupported statement starting with '" + name + "'");
        }
        s->value = rvalue();
        if (s->op && s->value.nondet) unsupported("nondet value in compound assignment");
      }
    }
    expect(terminator);
    return s;
  }

  StmtPtr call(const std::string& name, std::size_t line) {
    if (name == "assert" || name == "__VERIFIER_assert" || name == "assume" ||
        name == "__VERIFIER_assume" || name == "assume_abort_if_not") {
      const bool is_assert = name == "assert" || name == "__VERIFIER_assert";
      auto s = make_stmt(is_assert ? Kind::Assert : Kind::Assume, line);
      s->cond = parenthesized();
      if (s->cond.nondet) unsupported("nondet value as assume/assert argument");
      return s;
    }
    if (name == "reach_error" || name == "__VERIFIER_error" || name == "abort" ||
        is_marker_name(name)) {
      expect("(");
      expect(")");
      if (is_marker_name(name)) return make_stmt(Kind::Nop, line);
      return make_stmt(name == "abort" ? Kind::Abort : Kind::Error, line);
    }
    if (name == "exit") {
      skip_balanced("(", ")");
      return make_stmt(Kind::Abort, line);
    }
    unsupported("call to '" + name + "' is not supported");
  }

  // Finite ranges for nondet draws, read off the assume() statements that
  // follow them in the same statement list.
  static void infer_ranges(std::vector<StmtPtr>& list) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      std::vector<std::pair<std::string, NondetSpec*>> pending;
      auto collect = [&pending](Stmt& s) {
        bool any = false;
        auto add = [&](const std::string& name, RValue& v) {
          if (!v.nondet) return;
          any = true;
          // A later draw into the same variable hides the earlier one.
          std::erase_if(pending, [&](const auto& p) { return p.first == name; });
          pending.emplace_back(name, &*v.nondet);
        };
        if (s.kind == Kind::Assign) add(s.target, s.value);
        if (s.kind == Kind::Decl) {
          for (auto& d : s.decls) add(d.name, d.init);
        }
        return any;
      };
      if (!collect(*list[i])) continue;
      for (std::size_t j = i + 1; j < list.size(); ++j) {
        Stmt& next = *list[j];
        if (next.kind == Kind::Assume) {
          for (const auto& conjunct : flatten_and(strip_casts(next.cond.expr))) {
            for (auto& [name, spec] : pending) tighten(name, *spec, conjunct);
          }
        } else if (!collect(next)) {
          break;
        }
      }
    }
  }

  static std::optional<Integer> constant(const PredExpr& e) {
    if (!free_variables(e).empty()) return std::nullopt;
    try {
      return eval_expr(e, {});
    } catch (const EvalError&) {
      return std::nullopt;
    }
  }

  static void tighten(const std::string& var, NondetSpec& spec, const PredExpr& conjunct) {
    const auto* b = conjunct->as<Binary>();
    if (!b || !is_relational(b->op)) return;
    BinaryOp op = b->op;
    std::optional<Integer> c;
    const Var* lhs = b->lhs->as<Var>();
    const Var* rhs = b->rhs->as<Var>();
    if (lhs && lhs->name == var) {
      c = constant(b->rhs);
    } else if (rhs && rhs->name == var) {
      c = constant(b->lhs);
      // Mirror "c op v" into "v op' c".
      switch (op) {
        case BinaryOp::Lt: op = BinaryOp::Gt; break;
        case BinaryOp::Le: op = BinaryOp::Ge; break;
        case BinaryOp::Gt: op = BinaryOp::Lt; break;
        case BinaryOp::Ge: op = BinaryOp::Le; break;
        default: break;
      }
    }
    if (!c) return;
    auto raise = [&spec](const Integer& lo) {
      if (!spec.lo || *spec.lo < lo) spec.lo = lo;
    };
    auto lower = [&spec](const Integer& hi) {
      if (!spec.hi || *spec.hi > hi) spec.hi = hi;
    };
    switch (op) {
      case BinaryOp::Ge: raise(*c); break;
      case BinaryOp::Gt: raise(*c + 1); break;
      case BinaryOp::Le: lower(*c); break;
      case BinaryOp::Lt: lower(*c - 1); break;
      case BinaryOp::Eq:
        raise(*c);
        lower(*c);
        break;
      default: break;
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Execution

enum class Flow { Normal, Break, Continue, Return, Halt, Error, Unknown };

struct Choice {
  std::string name;
  Integer value;
  Integer hi;
};

class Budget {
 public:
  Budget(const BuiltinLimits& limits, double timeout)
      : limits_(limits), timeout_(timeout), start_(std::chrono::steady_clock::now()) {}

  bool expired(std::size_t pending_steps) const {
    if (limits_.time_model == TimeModel::Steps) {
      return static_cast<double>(spent_steps_ + pending_steps) * limits_.step_seconds > timeout_;
    }
    return elapsed_wall() > timeout_;
  }
  void commit(std::size_t steps) { spent_steps_ += steps; }
  std::size_t spent_steps() const { return spent_steps_; }
  double elapsed_wall() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  double elapsed() const {
    if (limits_.time_model == TimeModel::Steps) {
      return static_cast<double>(spent_steps_) * limits_.step_seconds;
    }
    return elapsed_wall();
  }

 private:
  const BuiltinLimits& limits_;
  double timeout_;
  std::chrono::steady_clock::time_point start_;
  std::size_t spent_steps_ = 0;
};

class Trace {
 public:
  Trace(const std::vector<Integer>& prefix, const BuiltinLimits& limits, const Budget& budget)
      : prefix_(prefix), limits_(limits), budget_(budget) {}

  Flow run(const Unit& unit) {
    for (const auto& g : unit.globals) {
      for (const auto& d : g->decls) {
        Integer v = 0;  // static storage starts zeroed
        if (d.init.present()) {
          if (const Flow f = value(d.init, d.name, g->line, v); f != Flow::Normal) return f;
        }
        env_.set(d.name, std::move(v));
      }
    }
    const Flow f = exec(*unit.main_body);
    if (f == Flow::Error || f == Flow::Unknown) return f;
    return Flow::Halt;
  }

  std::vector<Choice> choices;
  std::size_t steps = 0;
  std::string diagnostic;
  bool timed_out = false;

 private:
  bool tick() {
    if (++steps > limits_.max_steps) {
      diagnostic = "trace exceeded " + std::to_string(limits_.max_steps) + " steps";
      return false;
    }
    if ((steps & 0x3ff) == 0 && budget_.expired(steps)) {
      diagnostic = "timeout";
      timed_out = true;
      return false;
    }
    return true;
  }

  Flow fail(std::string message, std::size_t line) {
    diagnostic = std::move(message) + " (line " + std::to_string(line) + ")";
    return Flow::Unknown;
  }

  // Produces the value of `v` into `out`; anything but Normal ends the trace.
  Flow value(const RValue& v, const std::string& name, std::size_t line, Integer& out) {
    if (v.nondet) {
      const NondetSpec& spec = *v.nondet;
      if (!spec.lo || !spec.hi) {
        return fail("unbounded nondeterministic value for '" + name + "'", line);
      }
      if (*spec.lo > *spec.hi) return Flow::Halt;  // no value satisfies the assumptions
      const std::size_t k = choices.size();
      out = k < prefix_.size() ? prefix_[k] : *spec.lo;
      choices.push_back({name, out, *spec.hi});
      return Flow::Normal;
    }
    try {
      out = eval_expr(v.expr, env_);
    } catch (const UnboundVariable& e) {
      return fail("read of uninitialized or undeclared variable '" + e.name() + "'", line);
    } catch (const EvalError& e) {
      return fail(e.what(), line);
    }
    return Flow::Normal;
  }

  Flow truth(const RValue& cond, std::size_t line, bool& out) {
    if (!cond.present()) {
      out = true;
      return Flow::Normal;
    }
    Integer v;
    const Flow f = value(cond, "<condition>", line, v);
    out = v != 0;
    return f;
  }

  Flow loop(const Stmt& s, bool test_first) {
    bool first = true;
    for (;;) {
      if (test_first || !first) {
        if (!tick()) return Flow::Unknown;
        bool go = false;
        if (const Flow f = truth(s.cond, s.line, go); f != Flow::Normal) return f;
        if (!go) return Flow::Normal;
      }
      first = false;
      const Flow f = exec(*s.then_s);
      if (f == Flow::Break) return Flow::Normal;
      if (f != Flow::Normal && f != Flow::Continue) return f;
      if (s.step) {
        if (const Flow g = exec(*s.step); g != Flow::Normal) return g;
      }
    }
  }

  Flow exec(const Stmt& s) {
    if (s.kind != Kind::Block && !tick()) return Flow::Unknown;
    switch (s.kind) {
      case Kind::Block:
        for (const auto& child : s.body) {
          const Flow f = exec(*child);
          if (f != Flow::Normal) return f;
        }
        return Flow::Normal;
      case Kind::Decl:
        for (const auto& d : s.decls) {
          if (!d.init.present()) {
            env_.erase(d.name);
            continue;
          }
          Integer v;
          if (const Flow f = value(d.init, d.name, s.line, v); f != Flow::Normal) return f;
          env_.set(d.name, std::move(v));
        }
        return Flow::Normal;
      case Kind::Assign: {
        Integer v;
        if (const Flow f = value(s.value, s.target, s.line, v); f != Flow::Normal) return f;
        if (s.op) {
          const Integer* old = env_.find(s.target);
          if (!old) return fail("read of uninitialized or undeclared variable '" + s.target + "'", s.line);
          if ((*s.op == BinaryOp::Div || *s.op == BinaryOp::Mod) && v == 0) {
            return fail("division by zero", s.line);
          }
          switch (*s.op) {
            case BinaryOp::Add: v = *old + v; break;
            case BinaryOp::Sub: v = *old - v; break;
            case BinaryOp::Mul: v = *old * v; break;
            case BinaryOp::Div: v = *old / v; break;
            case BinaryOp::Mod: v = *old % v; break;
            default: break;
          }
        }
        env_.set(s.target, std::move(v));
        return Flow::Normal;
      }
      case Kind::Assume: {
        bool ok = false;
        if (const Flow f = truth(s.cond, s.line, ok); f != Flow::Normal) return f;
        return ok ? Flow::Normal : Flow::Halt;
      }
      case Kind::Assert: {
        bool ok = false;
        if (const Flow f = truth(s.cond, s.line, ok); f != Flow::Normal) return f;
        if (ok) return Flow::Normal;
        diagnostic = "assertion violated (line " + std::to_string(s.line) + ")";
        return Flow::Error;
      }
      case Kind::Error:
        diagnostic = "error function reached (line " + std::to_string(s.line) + ")";
        return Flow::Error;
      case Kind::Abort:
        return Flow::Halt;
      case Kind::If: {
        bool go = false;
        if (const Flow f = truth(s.cond, s.line, go); f != Flow::Normal) return f;
        if (go) return exec(*s.then_s);
        return s.else_s ? exec(*s.else_s) : Flow::Normal;
      }
      case Kind::While:
        return loop(s, true);
      case Kind::DoWhile:
        return loop(s, false);
      case Kind::For:
        if (s.init) {
          if (const Flow f = exec(*s.init); f != Flow::Normal) return f;
        }
        return loop(s, true);
      case Kind::Break: return Flow::Break;
      case Kind::Continue: return Flow::Continue;
      case Kind::Return: return Flow::Return;
      case Kind::Nop: return Flow::Normal;
    }
    return Flow::Normal;
  }

  const std::vector<Integer>& prefix_;
  const BuiltinLimits& limits_;
  const Budget& budget_;
  Environment env_;
};

}  // namespace

BuiltinReport builtin_check(std::string_view source, const BuiltinLimits& limits, double timeout) {
  BuiltinReport report;
  Verdict& verdict = report.verdict;
  Budget budget(limits, timeout);
  auto finish = [&](Outcome outcome, std::string diagnostic) {
    verdict.outcome = outcome;
    verdict.diagnostic = std::move(diagnostic);
    verdict.wall_time = budget.elapsed();
    report.total_steps = budget.spent_steps();
    return report;
  };

  Unit unit;
  try {
    unit = Parser(source).parse_unit();
  } catch (const UnsupportedConstruct& e) {
    return finish(Outcome::Unknown, std::string("unsupported construct: ") + e.what());
  }

  std::vector<Integer> prefix;
  for (;;) {
    if (report.traces >= limits.max_states) {
      return finish(Outcome::Unknown,
                    "explored " + std::to_string(limits.max_states) + " traces without finishing");
    }
    Trace trace(prefix, limits, budget);
    const Flow flow = trace.run(unit);
    ++report.traces;
    budget.commit(trace.steps);

    if (trace.timed_out || budget.expired(0)) {
      verdict.timed_out = true;
      return finish(Outcome::Unknown, "timeout");
    }
    if (flow == Flow::Error) {
      for (const auto& c : trace.choices) report.counterexample.emplace_back(c.name, c.value);
      std::string diag = trace.diagnostic;
      if (!report.counterexample.empty()) {
        diag += "; counterexample:";
        for (const auto& [name, value] : report.counterexample) diag += " " + name + "=" + value.str();
      }
      return finish(Outcome::False, std::move(diag));
    }
    if (flow == Flow::Unknown) return finish(Outcome::Unknown, trace.diagnostic);

    // Next valuation in lexicographic order over the draws of this trace.
    std::size_t k = trace.choices.size();
    while (k > 0 && trace.choices[k - 1].value >= trace.choices[k - 1].hi) --k;
    if (k == 0) return finish(Outcome::True, "");
    prefix.clear();
    for (std::size_t i = 0; i < k; ++i) prefix.push_back(trace.choices[i].value);
    prefix.back() += 1;
  }
}

OracleResult BuiltinBackend::check(const std::string& source, double timeout) const {
  const BuiltinReport report = builtin_check(source, limits_, timeout);
  OracleResult r;
  r.outcome = report.verdict.outcome;
  r.timed_out = report.verdict.timed_out;
  r.diagnostic = report.verdict.diagnostic;
  if (limits_.time_model == TimeModel::Steps) r.reported_time = report.verdict.wall_time;
  return r;
}

}  // namespace invkit
