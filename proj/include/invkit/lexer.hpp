#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace invkit {

enum class TokenKind { Identifier, Number, String, Punct, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  std::size_t offset = 0;  // byte offset of the first character
  std::size_t line = 1;    // 1-based

  bool is(std::string_view punct) const {
    return kind == TokenKind::Punct && text == punct;
  }
  bool is_identifier(std::string_view name) const {
    return kind == TokenKind::Identifier && text == name;
  }
};

struct LexOptions {
  // Skip `#...` lines (preprocessor directives) instead of rejecting them.
  bool skip_directives = false;
  // Skip characters that do not start a token instead of raising SyntaxError.
  bool lenient = false;
};

/// Splits C text into tokens. Comments are dropped. The returned vector always
/// ends with a TokenKind::End token.
std::vector<Token> tokenize(std::string_view text, const LexOptions& options = {});

/// Assignment, compound-assignment, increment and decrement punctuators.
bool is_side_effect_operator(std::string_view punct);

}  // namespace invkit
