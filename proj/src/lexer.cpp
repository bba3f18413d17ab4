#include "invkit/lexer.hpp"

#include <array>
#include <cctype>

#include "invkit/errors.hpp"

namespace invkit {

namespace {

// Longest first so that greedy matching works.
constexpr std::array<std::string_view, 47> kPunctuators = {
    "<<=", ">>=", "...", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=",
    "^=",  "==",  "!=",  "<=", ">=", "&&", "||", "<<", ">>", "->", "+",  "-",
    "*",   "/",   "%",   "<",  ">",  "=",  "!",  "~",  "&",  "|",  "^",  "?",
    ":",   "(",   ")",   "{",  "}",  "[",  "]",  ";",  ",",  ".",  "#"};

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

bool is_side_effect_operator(std::string_view punct) {
  static constexpr std::array<std::string_view, 13> kOps = {
      "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", "++", "--"};
  for (auto op : kOps) {
    if (op == punct) return true;
  }
  return false;
}

std::vector<Token> tokenize(std::string_view text, const LexOptions& options) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  std::size_t line = 1;
  bool at_line_start = true;
  const std::size_t n = text.size();

  while (i < n) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
      at_line_start = true;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '/') {
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '*') {
      const auto end = text.find("*/", i + 2);
      if (end == std::string_view::npos) throw SyntaxError("unterminated comment", i);
      for (std::size_t j = i; j < end; ++j) {
        if (text[j] == '\n') ++line;
      }
      i = end + 2;
      continue;
    }
    if (c == '#' && at_line_start && options.skip_directives) {
      // Directives may continue across backslash-newline.
      while (i < n && text[i] != '\n') {
        if (text[i] == '\\' && i + 1 < n && text[i + 1] == '\n') {
          ++line;
          i += 2;
          continue;
        }
        ++i;
      }
      continue;
    }
    at_line_start = false;

    Token tok;
    tok.offset = i;
    tok.line = line;
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < n && is_ident_char(text[j])) ++j;
      tok.kind = TokenKind::Identifier;
      tok.text = std::string(text.substr(i, j - i));
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < n && (is_ident_char(text[j]) || text[j] == '.')) ++j;
      tok.kind = TokenKind::Number;
      tok.text = std::string(text.substr(i, j - i));
      i = j;
    } else if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      while (j < n && text[j] != c) {
        if (text[j] == '\\') ++j;
        if (j < n && text[j] == '\n') throw SyntaxError("unterminated literal", i);
        ++j;
      }
      if (j >= n) throw SyntaxError("unterminated literal", i);
      tok.kind = TokenKind::String;
      tok.text = std::string(text.substr(i, j + 1 - i));
      i = j + 1;
    } else {
      std::string_view matched;
      for (auto p : kPunctuators) {
        if (text.substr(i, p.size()) == p) {
          matched = p;
          break;
        }
      }
      if (matched.empty()) {
        if (options.lenient) {
          ++i;
          continue;
        }
        throw SyntaxError(std::string("unexpected character '") + c + "'", i);
      }
      tok.kind = TokenKind::Punct;
      tok.text = std::string(matched);
      i += matched.size();
    }
    tokens.push_back(std::move(tok));
  }

  Token end;
  end.kind = TokenKind::End;
  end.offset = n;
  end.line = line;
  tokens.push_back(std::move(end));
  return tokens;
}

}  // namespace invkit
