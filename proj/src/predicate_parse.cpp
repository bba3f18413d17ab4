#include <optional>

#include "invkit/predicate.hpp"

namespace invkit {

namespace {

bool is_reserved_word(std::string_view word) {
  static constexpr std::string_view kWords[] = {
      "if",     "else",   "while",   "for",    "do",     "return", "break",
      "continue", "sizeof", "goto",  "switch", "case",   "default", "struct",
      "union",  "enum",   "typedef", "void",   "static", "extern"};
  for (auto w : kWords) {
    if (w == word) return true;
  }
  return is_type_keyword(word);
}

std::optional<BinaryOp> binary_op_for(const Token& tok) {
  if (tok.kind != TokenKind::Punct) return std::nullopt;
  const std::string& t = tok.text;
  if (t == "||") return BinaryOp::Or;
  if (t == "&&") return BinaryOp::And;
  if (t == "==") return BinaryOp::Eq;
  if (t == "!=") return BinaryOp::Ne;
  if (t == "<") return BinaryOp::Lt;
  if (t == "<=") return BinaryOp::Le;
  if (t == ">") return BinaryOp::Gt;
  if (t == ">=") return BinaryOp::Ge;
  if (t == "+") return BinaryOp::Add;
  if (t == "-") return BinaryOp::Sub;
  if (t == "*") return BinaryOp::Mul;
  if (t == "/") return BinaryOp::Div;
  if (t == "%") return BinaryOp::Mod;
  return std::nullopt;
}

bool is_unsupported_binary(const Token& tok) {
  return tok.is("&") || tok.is("|") || tok.is("^") || tok.is("<<") || tok.is(">>");
}

Integer parse_number(const Token& tok) {
  std::string digits = tok.text;
  while (!digits.empty()) {
    const char c = digits.back();
    if (c == 'u' || c == 'U' || c == 'l' || c == 'L') {
      digits.pop_back();
    } else {
      break;
    }
  }
  if (digits.empty()) throw SyntaxError("malformed integer literal '" + tok.text + "'", tok.offset);

  unsigned base = 10;
  std::size_t start = 0;
  if (digits.size() > 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X')) {
    base = 16;
    start = 2;
  } else if (digits.size() > 1 && digits[0] == '0') {
    base = 8;
    start = 1;
  }
  Integer value = 0;
  for (std::size_t i = start; i < digits.size(); ++i) {
    const char c = digits[i];
    unsigned d;
    if (c >= '0' && c <= '9') {
      d = static_cast<unsigned>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      d = static_cast<unsigned>(c - 'a' + 10);
    } else if (c >= 'A' && c <= 'F') {
      d = static_cast<unsigned>(c - 'A' + 10);
    } else {
      throw SyntaxError("unsupported numeric literal '" + tok.text + "'", tok.offset);
    }
    if (d >= base) throw SyntaxError("malformed integer literal '" + tok.text + "'", tok.offset);
    value = value * base + d;
  }
  return value;
}

class Parser {
 public:
  Parser(std::span<const Token> tokens, std::size_t pos) : toks_(tokens), pos_(pos) {}

  std::size_t position() const { return pos_; }

  PredExpr conditional() {
    PredExpr cond = binary(1);
    if (!peek().is("?")) return cond;
    advance();
    PredExpr then_expr = conditional();
    expect(":");
    PredExpr else_expr = conditional();
    return make_ternary(std::move(cond), std::move(then_expr), std::move(else_expr));
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  const Token& advance() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  void expect(std::string_view punct) {
    if (!peek().is(punct)) {
      throw SyntaxError("expected '" + std::string(punct) + "' but found " + describe(peek()),
                        peek().offset);
    }
    advance();
  }
  static std::string describe(const Token& t) {
    if (t.kind == TokenKind::End) return "end of input";
    return "'" + t.text + "'";
  }

  PredExpr binary(int min_prec) {
    PredExpr lhs = unary();
    for (;;) {
      const Token& tok = peek();
      if (is_unsupported_binary(tok)) {
        throw SyntaxError("unsupported operator '" + tok.text + "'", tok.offset);
      }
      const auto op = binary_op_for(tok);
      if (!op || precedence(*op) < min_prec) return lhs;
      advance();
      PredExpr rhs = binary(precedence(*op) + 1);
      lhs = make_binary(*op, std::move(lhs), std::move(rhs));
    }
  }

  // Decides whether the '(' at the cursor opens a cast. Returns the type name
  // and the number of tokens it spans (including both parentheses).
  std::optional<std::pair<std::string, std::size_t>> cast_prefix() const {
    std::size_t i = 1;
    std::vector<std::string_view> words;
    while (peek(i).kind == TokenKind::Identifier) {
      words.push_back(peek(i).text);
      ++i;
    }
    if (words.empty() || !peek(i).is(")")) return std::nullopt;

    bool all_keywords = true;
    for (auto w : words) all_keywords = all_keywords && is_type_keyword(w);
    if (!all_keywords) {
      // A lone unknown name is a cast only when an operand follows directly,
      // e.g. "(uint32_t) x". "(x) - y" stays a subtraction.
      if (words.size() != 1 || is_reserved_word(words[0])) return std::nullopt;
      const Token& next = peek(i + 1);
      const bool operand_follows = next.kind == TokenKind::Identifier ||
                                   next.kind == TokenKind::Number || next.is("(") ||
                                   next.is("!");
      if (!operand_follows) return std::nullopt;
    }
    std::string name;
    for (auto w : words) {
      if (!name.empty()) name += ' ';
      name += w;
    }
    return std::make_pair(std::move(name), i + 1);
  }

  PredExpr unary() {
    const Token& tok = peek();
    if (tok.is("-")) {
      advance();
      return make_unary(UnaryOp::Neg, unary());
    }
    if (tok.is("!")) {
      advance();
      return make_unary(UnaryOp::LogNot, unary());
    }
    if (tok.is("+")) {
      advance();
      return unary();
    }
    if (tok.is("~") || tok.is("&") || tok.is("*")) {
      throw SyntaxError("unsupported operator '" + tok.text + "'", tok.offset);
    }
    if (tok.kind == TokenKind::Punct && is_side_effect_operator(tok.text)) {
      throw SideEffectError("side-effecting operator '" + tok.text + "'", tok.offset);
    }
    if (tok.is("(")) {
      if (auto cast = cast_prefix()) {
        pos_ += cast->second;
        return make_cast(std::move(cast->first), unary());
      }
      advance();
      PredExpr inner = conditional();
      expect(")");
      return inner;
    }
    return primary();
  }

  PredExpr primary() {
    const Token& tok = peek();
    switch (tok.kind) {
      case TokenKind::Number: {
        advance();
        return make_int(parse_number(tok));
      }
      case TokenKind::Identifier: {
        if (tok.text == "true" || tok.text == "false") {
          advance();
          return make_bool(tok.text == "true");
        }
        if (is_reserved_word(tok.text)) {
          throw SyntaxError("unexpected keyword '" + tok.text + "'", tok.offset);
        }
        const Token& next = peek(1);
        if (next.is("(")) throw SyntaxError("function calls are not supported", tok.offset);
        if (next.is("[")) throw SyntaxError("array access is not supported", tok.offset);
        if (next.is(".") || next.is("->")) {
          throw SyntaxError("member access is not supported", tok.offset);
        }
        advance();
        return make_var(tok.text);
      }
      case TokenKind::End:
        throw SyntaxError("unexpected end of input", tok.offset);
      default:
        throw SyntaxError("unexpected token '" + tok.text + "'", tok.offset);
    }
  }

  std::span<const Token> toks_;
  std::size_t pos_;
};

}  // namespace

PredExpr parse_expression(std::span<const Token> tokens, std::size_t& pos) {
  if (tokens.empty()) throw SyntaxError("empty token stream", 0);
  Parser parser(tokens, pos);
  PredExpr result = parser.conditional();
  pos = parser.position();
  return result;
}

PredExpr parse_predicate(std::string_view text) {
  const auto tokens = tokenize(text);
  for (const auto& tok : tokens) {
    if (tok.kind == TokenKind::Punct && is_side_effect_operator(tok.text)) {
      throw SideEffectError("side-effecting operator '" + tok.text + "'", tok.offset);
    }
  }
  if (tokens.size() == 1) throw SyntaxError("empty predicate", 0);
  std::size_t pos = 0;
  PredExpr result = parse_expression(tokens, pos);
  if (tokens[pos].kind != TokenKind::End) {
    throw SyntaxError("unexpected token '" + tokens[pos].text + "'", tokens[pos].offset);
  }
  return result;
}

bool check_no_side_effects(std::string_view text) {
  LexOptions options;
  options.lenient = true;
  std::vector<Token> tokens;
  try {
    tokens = tokenize(text, options);
  } catch (const SyntaxError&) {
    return false;  // unterminated comment or literal: does not lex
  }
  for (const auto& tok : tokens) {
    if (tok.kind == TokenKind::Punct && is_side_effect_operator(tok.text)) return false;
  }
  return true;
}

}  // namespace invkit
