#pragma once

// A deliberately naive second executor for the mini-C subset, written without
// reusing any library code. Every nondet call ranges over [-bound, bound]
// (or {0, 1} for _Bool) and assume() simply discards traces. Used only to
// cross-check the built-in backend.

#include <cctype>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace invkit::testing::ref {

enum class Result { Safe, Unsafe, Unknown };

namespace detail {

struct Tok {
  std::string s;
  bool ident = false;
  bool num = false;
};

inline std::vector<Tok> lex(const std::string& src) {
  std::vector<Tok> out;
  std::size_t i = 0;
  const std::vector<std::string> puncts = {"++", "--", "+=", "-=", "*=", "/=", "%=", "==", "!=", "<=",
                                           ">=", "&&", "||", "+",  "-",  "*",  "/",  "%",  "<",  ">",
                                           "=",  "!",  "?",  ":",  "(",  ")",  "{",  "}",  ";",  ","};
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (src.compare(i, 2, "//") == 0 || c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
    } else if (src.compare(i, 2, "/*") == 0) {
      i = src.find("*/", i + 2) + 2;
    } else if (c == '"') {
      std::size_t j = i + 1;
      while (src[j] != '"') j += src[j] == '\\' ? 2 : 1;
      out.push_back({src.substr(i, j + 1 - i)});
      i = j + 1;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({src.substr(i, j - i), true});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({src.substr(i, j - i), false, true});
      i = j;
    } else {
      bool matched = false;
      for (const auto& p : puncts) {
        if (src.compare(i, p.size(), p) == 0) {
          out.push_back({p});
          i += p.size();
          matched = true;
          break;
        }
      }
      if (!matched) throw std::runtime_error(std::string("ref lexer: bad char ") + c);
    }
  }
  out.push_back({"<eof>"});
  return out;
}

struct NeedChoice {
  bool boolean;
};
struct Stop {};       // assume failed / abort / return
struct Violation {};  // error reached
struct OutOfFuel {};

struct Machine;
using ExprFn = std::function<long long(Machine&)>;

struct Node {
  std::string kind;  // see exec()
  std::string name;
  std::string op;
  ExprFn e;
  std::vector<std::shared_ptr<Node>> kids;
};
using NodeP = std::shared_ptr<Node>;

struct Machine {
  std::map<std::string, long long> vars;
  std::vector<long long> script;
  std::size_t next = 0;
  long fuel = 0;

  long long draw(bool boolean) {
    if (next == script.size()) throw NeedChoice{boolean};
    return script[next++];
  }
  void burn() {
    if (--fuel < 0) throw OutOfFuel{};
  }
};

struct BreakSig {};
struct ContinueSig {};

class Reader {
 public:
  explicit Reader(std::vector<Tok> t) : t_(std::move(t)) {}

  NodeP program() {
    NodeP globals = std::make_shared<Node>(Node{"seq"});
    NodeP main_body;
    while (t_[p_].s != "<eof>") {
      if (t_[p_].s == ";") {
        ++p_;
        continue;
      }
      while (is_type(t_[p_].s)) ++p_;
      const std::string name = t_[p_++].s;
      if (t_[p_].s == "(") {
        skip("(", ")");
        if (t_[p_].s == ";") {
          ++p_;
        } else if (name == "main") {
          main_body = stmt();
        } else {
          skip("{", "}");
        }
        continue;
      }
      --p_;
      globals->kids.push_back(decl());
    }
    NodeP top = std::make_shared<Node>(Node{"seq"});
    top->kids = {globals, main_body};
    return top;
  }

 private:
  static bool is_type(const std::string& s) {
    return s == "int" || s == "long" || s == "unsigned" || s == "short" || s == "char" ||
           s == "_Bool" || s == "void" || s == "extern" || s == "signed" || s == "static";
  }
  void skip(const std::string& open, const std::string& close) {
    int depth = 0;
    do {
      if (t_[p_].s == open) ++depth;
      if (t_[p_].s == close) --depth;
      ++p_;
    } while (depth > 0);
  }
  void want(const std::string& s) {
    if (t_[p_].s != s) throw std::runtime_error("ref parser: expected " + s + " got " + t_[p_].s);
    ++p_;
  }

  NodeP decl() {
    while (is_type(t_[p_].s)) ++p_;
    NodeP seq = std::make_shared<Node>(Node{"seq"});
    for (;;) {
      NodeP d = std::make_shared<Node>(Node{"decl", t_[p_++].s});
      if (t_[p_].s == "=") {
        ++p_;
        d->e = expr();
        d->op = "init";
      }
      seq->kids.push_back(d);
      if (t_[p_].s != ",") break;
      ++p_;
    }
    want(";");
    return seq;
  }

  NodeP stmt() {
    const std::string s = t_[p_].s;
    if (s == "{") {
      ++p_;
      NodeP seq = std::make_shared<Node>(Node{"seq"});
      while (t_[p_].s != "}") seq->kids.push_back(stmt());
      ++p_;
      return seq;
    }
    if (s == ";") {
      ++p_;
      return std::make_shared<Node>(Node{"seq"});
    }
    if (s == "if") {
      ++p_;
      NodeP n = std::make_shared<Node>(Node{"if"});
      want("(");
      n->e = expr();
      want(")");
      n->kids.push_back(stmt());
      if (t_[p_].s == "else") {
        ++p_;
        n->kids.push_back(stmt());
      }
      return n;
    }
    if (s == "while") {
      ++p_;
      NodeP n = std::make_shared<Node>(Node{"while"});
      want("(");
      n->e = expr();
      want(")");
      n->kids.push_back(stmt());
      return n;
    }
    if (s == "do") {
      ++p_;
      NodeP n = std::make_shared<Node>(Node{"do"});
      n->kids.push_back(stmt());
      want("while");
      want("(");
      n->e = expr();
      want(")");
      want(";");
      return n;
    }
    if (s == "for") {
      ++p_;
      NodeP n = std::make_shared<Node>(Node{"for"});
      want("(");
      NodeP init = std::make_shared<Node>(Node{"seq"});
      if (is_type(t_[p_].s)) {
        init = decl();
      } else if (t_[p_].s != ";") {
        init = simple();
        want(";");
      } else {
        ++p_;
      }
      n->e = t_[p_].s == ";" ? ExprFn([](Machine&) { return 1LL; }) : expr();
      want(";");
      NodeP step = t_[p_].s == ")" ? std::make_shared<Node>(Node{"seq"}) : simple();
      want(")");
      n->kids = {init, stmt(), step};
      return n;
    }
    if (s == "break" || s == "continue" || s == "return") {
      while (t_[p_].s != ";") ++p_;
      ++p_;
      return std::make_shared<Node>(Node{s});
    }
    if (is_type(s)) return decl();
    if (t_[p_ + 1].s == ":") {
      p_ += 2;
      return stmt();
    }
    NodeP n = simple();
    want(";");
    return n;
  }

  NodeP simple() {
    if (t_[p_].s == "++" || t_[p_].s == "--") {
      const std::string op = t_[p_++].s == "++" ? "+=" : "-=";
      NodeP n = std::make_shared<Node>(Node{"assign", t_[p_++].s, op});
      n->e = [](Machine&) { return 1LL; };
      return n;
    }
    const std::string name = t_[p_++].s;
    if (t_[p_].s == "(") {
      ++p_;
      NodeP n = std::make_shared<Node>(Node{"call", name});
      if (t_[p_].s != ")") n->e = expr();
      want(")");
      return n;
    }
    if (t_[p_].s == "++" || t_[p_].s == "--") {
      NodeP n = std::make_shared<Node>(Node{"assign", name, t_[p_++].s == "++" ? "+=" : "-="});
      n->e = [](Machine&) { return 1LL; };
      return n;
    }
    NodeP n = std::make_shared<Node>(Node{"assign", name, t_[p_++].s});
    n->e = expr();
    return n;
  }

  ExprFn expr() {
    ExprFn c = binary(0);
    if (t_[p_].s != "?") return c;
    ++p_;
    ExprFn a = expr();
    want(":");
    ExprFn b = expr();
    return [c, a, b](Machine& m) { return c(m) ? a(m) : b(m); };
  }

  static int rank(const std::string& op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "==" || op == "!=") return 3;
    if (op == "<" || op == "<=" || op == ">" || op == ">=") return 4;
    if (op == "+" || op == "-") return 5;
    if (op == "*" || op == "/" || op == "%") return 6;
    return -1;
  }

  ExprFn binary(int min) {
    ExprFn lhs = unary();
    for (;;) {
      const std::string op = t_[p_].s;
      const int r = rank(op);
      if (r < 0 || r < min) return lhs;
      ++p_;
      ExprFn rhs = binary(r + 1);
      lhs = combine(op, lhs, rhs);
    }
  }

  static ExprFn combine(const std::string& op, ExprFn a, ExprFn b) {
    if (op == "||") return [a, b](Machine& m) -> long long { return a(m) || b(m); };
    if (op == "&&") return [a, b](Machine& m) -> long long { return a(m) && b(m); };
    if (op == "==") return [a, b](Machine& m) -> long long { return a(m) == b(m); };
    if (op == "!=") return [a, b](Machine& m) -> long long { return a(m) != b(m); };
    if (op == "<") return [a, b](Machine& m) -> long long { return a(m) < b(m); };
    if (op == "<=") return [a, b](Machine& m) -> long long { return a(m) <= b(m); };
    if (op == ">") return [a, b](Machine& m) -> long long { return a(m) > b(m); };
    if (op == ">=") return [a, b](Machine& m) -> long long { return a(m) >= b(m); };
    if (op == "+") return [a, b](Machine& m) { return a(m) + b(m); };
    if (op == "-") return [a, b](Machine& m) { return a(m) - b(m); };
    if (op == "*") return [a, b](Machine& m) { return a(m) * b(m); };
    if (op == "/") return [a, b](Machine& m) { return a(m) / b(m); };
    return [a, b](Machine& m) { return a(m) % b(m); };
  }

  ExprFn unary() {
    const std::string s = t_[p_].s;
    if (s == "-") {
      ++p_;
      ExprFn a = unary();
      return [a](Machine& m) { return -a(m); };
    }
    if (s == "!") {
      ++p_;
      ExprFn a = unary();
      return [a](Machine& m) -> long long { return !a(m); };
    }
    if (s == "(") {
      ++p_;
      ExprFn a = expr();
      want(")");
      return a;
    }
    ++p_;
    if (t_[p_ - 1].num) {
      const long long v = std::stoll(s);
      return [v](Machine&) { return v; };
    }
    if (s == "true" || s == "false") {
      const long long v = s == "true";
      return [v](Machine&) { return v; };
    }
    if (s.rfind("__VERIFIER_nondet_", 0) == 0) {
      p_ += 2;
      const bool boolean = s == "__VERIFIER_nondet_bool";
      return [boolean](Machine& m) { return m.draw(boolean); };
    }
    return [s](Machine& m) {
      auto it = m.vars.find(s);
      if (it == m.vars.end()) throw std::runtime_error("ref: unset " + s);
      return it->second;
    };
  }

  std::vector<Tok> t_;
  std::size_t p_ = 0;
};

inline void exec(const NodeP& n, Machine& m) {
  const std::string& k = n->kind;
  if (k == "seq") {
    for (const auto& c : n->kids) {
      if (c) exec(c, m);
    }
    return;
  }
  m.burn();
  if (k == "decl") {
    if (n->op == "init") {
      m.vars[n->name] = n->e(m);
    } else if (!m.vars.count(n->name)) {
      m.vars[n->name] = 0;  // only globals are read before assignment in the corpus
    }
  } else if (k == "assign") {
    const long long v = n->e(m);
    long long& slot = m.vars[n->name];
    if (n->op == "=") slot = v;
    if (n->op == "+=") slot += v;
    if (n->op == "-=") slot -= v;
    if (n->op == "*=") slot *= v;
    if (n->op == "/=") slot /= v;
    if (n->op == "%=") slot %= v;
  } else if (k == "call") {
    const std::string& f = n->name;
    if (f == "assert" || f == "__VERIFIER_assert") {
      if (!n->e(m)) throw Violation{};
    } else if (f == "assume" || f == "__VERIFIER_assume" || f == "assume_abort_if_not") {
      if (!n->e(m)) throw Stop{};
    } else if (f == "reach_error" || f == "__VERIFIER_error") {
      throw Violation{};
    } else if (f == "abort") {
      throw Stop{};
    }
  } else if (k == "if") {
    if (n->e(m)) {
      exec(n->kids[0], m);
    } else if (n->kids.size() > 1) {
      exec(n->kids[1], m);
    }
  } else if (k == "while" || k == "do" || k == "for") {
    if (k == "for") exec(n->kids[0], m);
    const NodeP& body = k == "for" ? n->kids[1] : n->kids[0];
    bool first = true;
    for (;;) {
      if (k != "do" || !first) {
        m.burn();
        if (!n->e(m)) break;
      }
      first = false;
      try {
        exec(body, m);
      } catch (const BreakSig&) {
        break;
      } catch (const ContinueSig&) {
      }
      if (k == "for") exec(n->kids[2], m);
    }
  } else if (k == "break") {
    throw BreakSig{};
  } else if (k == "continue") {
    throw ContinueSig{};
  } else if (k == "return") {
    throw Stop{};
  }
}

}  // namespace detail

/// Explores every nondet valuation depth-first.
inline Result check(const std::string& source, long long bound = 60, long fuel = 100000) {
  using namespace detail;
  const NodeP prog = Reader(lex(source)).program();
  bool unknown = false;
  std::function<bool(std::vector<long long>)> explore = [&](std::vector<long long> script) {
    Machine m;
    m.script = script;
    m.fuel = fuel;
    try {
      exec(prog, m);
    } catch (const NeedChoice& need) {
      const long long lo = need.boolean ? 0 : -bound;
      const long long hi = need.boolean ? 1 : bound;
      for (long long v = lo; v <= hi; ++v) {
        script.push_back(v);
        if (explore(script)) return true;
        script.pop_back();
      }
    } catch (const Violation&) {
      return true;
    } catch (const Stop&) {
    } catch (const OutOfFuel&) {
      unknown = true;
    }
    return false;
  };
  if (explore({})) return Result::Unsafe;
  return unknown ? Result::Unknown : Result::Safe;
}

}  // namespace invkit::testing::ref
