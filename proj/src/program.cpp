#include "invkit/program.hpp"

#include <algorithm>
#include <cctype>

namespace invkit {

bool is_marker_name(std::string_view name) {
  constexpr std::string_view kPrefix = "INVARIANT_MARKER_";
  if (name.size() <= kPrefix.size() || name.substr(0, kPrefix.size()) != kPrefix) return false;
  return std::all_of(name.begin() + static_cast<std::ptrdiff_t>(kPrefix.size()), name.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; });
}

namespace {

bool is_assert_name(std::string_view name) {
  return name == "assert" || name == "__VERIFIER_assert";
}

// A name preceded by a type word is being declared or defined, not called.
bool is_declaration_at(const std::vector<Token>& toks, std::size_t i) {
  if (i == 0) return false;
  const Token& prev = toks[i - 1];
  return prev.kind == TokenKind::Identifier && (prev.text == "void" || is_type_keyword(prev.text));
}

bool declares(const std::vector<Token>& toks, std::string_view name) {
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].is_identifier(name) && is_declaration_at(toks, i)) return true;
  }
  return false;
}

// Removing a statement after `if (...)`, `else`, `do` or a label must leave an
// empty statement behind.
bool needs_placeholder(const std::vector<Token>& toks, std::size_t i) {
  if (i == 0) return false;
  const Token& prev = toks[i - 1];
  return prev.is(")") || prev.is(":") || prev.is_identifier("else") || prev.is_identifier("do");
}

std::size_t matching_paren(const std::vector<Token>& toks, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < toks.size(); ++i) {
    if (toks[i].is("(")) ++depth;
    if (toks[i].is(")") && --depth == 0) return i;
  }
  return std::string::npos;
}

std::vector<Token> lex_program(std::string_view source) {
  LexOptions options;
  options.skip_directives = true;
  options.lenient = true;
  try {
    return tokenize(source, options);
  } catch (const SyntaxError& e) {
    throw ProgramError(std::string("program does not lex: ") + e.what());
  }
}

struct Site {
  SourceSpan span;
  bool placeholder = false;
};

}  // namespace

Program Program::from_source(std::string source) {
  Program p;
  p.source_ = std::move(source);
  const auto toks = lex_program(p.source_);

  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    const Token& tok = toks[i];
    if (tok.kind != TokenKind::Identifier || !toks[i + 1].is("(")) continue;
    if (is_declaration_at(toks, i)) continue;

    if (is_marker_name(tok.text)) {
      if (i + 3 >= toks.size() || !toks[i + 2].is(")") || !toks[i + 3].is(";")) {
        throw ProgramError("marker '" + tok.text + "' must be written as a call statement");
      }
      if (p.find_marker(tok.text)) throw ProgramError("duplicate marker '" + tok.text + "'");
      p.markers_.push_back({tok.text, {tok.offset, toks[i + 3].offset + 1, tok.line}});
      i += 3;
    } else if (is_assert_name(tok.text)) {
      const std::size_t close = matching_paren(toks, i + 1);
      if (close == std::string::npos) throw ProgramError("unbalanced assertion call");
      const std::size_t cond_begin = toks[i + 1].offset + 1;
      TargetSite site;
      site.condition_text = p.source_.substr(cond_begin, toks[close].offset - cond_begin);
      std::size_t end = toks[close].offset + 1;
      if (close + 1 < toks.size() && toks[close + 1].is(";")) end = toks[close + 1].offset + 1;
      site.span = {tok.offset, end, tok.line};
      try {
        site.predicate = parse_predicate(site.condition_text);
      } catch (const ParseError&) {
        site.predicate = nullptr;
      }
      p.targets_.push_back(std::move(site));
      i = close;
    }
  }
  return p;
}

const MarkerSite* Program::find_marker(std::string_view name) const noexcept {
  for (const auto& m : markers_) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

bool Program::has_location(std::string_view location) const noexcept {
  if (location == kTargetLocation) return !targets_.empty();
  return find_marker(location) != nullptr;
}

PredExpr Program::target_predicate() const {
  return targets_.empty() ? nullptr : targets_.back().predicate;
}

VerificationQuery VerificationQuery::from_program(Program program) {
  PredExpr q = program.target_predicate();
  return {{}, std::move(program), {std::string(kTargetLocation), std::move(q)}};
}

std::string annotate(const Program& program, const std::vector<Property>& assumes,
                     const Property& assertion) {
  for (const auto& a : assumes) {
    if (!program.has_location(a.location)) throw UnknownMarker(a.location);
  }
  if (!program.has_location(assertion.location)) throw UnknownMarker(assertion.location);

  const std::string& src = program.source();
  const auto toks = lex_program(src);
  auto token_index_at = [&](std::size_t offset) {
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (toks[i].offset == offset) return i;
    }
    return std::size_t{0};
  };
  auto call = [](std::string_view fn, const PredExpr& e) {
    return std::string(fn) + "(" + print_minimal(e, LiteralStyle::Integers) + ");";
  };

  struct Edit {
    SourceSpan span;
    std::string text;
    bool placeholder;
  };
  std::vector<Edit> edits;

  for (const auto& m : program.markers()) {
    std::string text;
    for (const auto& a : assumes) {
      if (a.location != m.name) continue;
      if (!text.empty()) text += ' ';
      text += call("assume", a.predicate);
    }
    if (assertion.location == m.name) {
      if (!text.empty()) text += ' ';
      text += call("assert", assertion.predicate);
    }
    edits.push_back({m.span, std::move(text), needs_placeholder(toks, token_index_at(m.span.begin))});
  }

  const bool assert_at_target = assertion.location == kTargetLocation;
  const auto& targets = program.targets();
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const bool last = t + 1 == targets.size();
    std::string text;
    if (last) {
      for (const auto& a : assumes) {
        if (a.location != kTargetLocation) continue;
        if (!text.empty()) text += ' ';
        text += call("assume", a.predicate);
      }
    }
    const std::string original = src.substr(targets[t].span.begin,
                                            targets[t].span.end - targets[t].span.begin);
    if (assert_at_target) {
      if (!text.empty()) text += ' ';
      const bool replace = last && assertion.predicate &&
                           !(targets[t].predicate && same_tree(targets[t].predicate, assertion.predicate));
      text += replace ? call("assert", assertion.predicate) : original;
    }
    edits.push_back({targets[t].span, std::move(text),
                     needs_placeholder(toks, token_index_at(targets[t].span.begin))});
  }

  std::sort(edits.begin(), edits.end(),
            [](const Edit& a, const Edit& b) { return a.span.begin < b.span.begin; });

  std::string body;
  body.reserve(src.size() + 256);
  std::size_t cursor = 0;
  for (const auto& e : edits) {
    body.append(src, cursor, e.span.begin - cursor);
    const auto removed = src.substr(e.span.begin, e.span.end - e.span.begin);
    if (e.text.empty() && e.placeholder) {
      body += ';';
    } else {
      body += e.text;
    }
    // Keep every later statement on its original line.
    body.append(static_cast<std::size_t>(std::count(removed.begin(), removed.end(), '\n')) -
                    static_cast<std::size_t>(std::count(e.text.begin(), e.text.end(), '\n')),
                '\n');
    cursor = e.span.end;
  }
  body.append(src, cursor, std::string::npos);

  std::string prelude;
  if (!declares(toks, "abort")) prelude += "extern void abort(void);\n";
  if (!declares(toks, "reach_error")) prelude += "void reach_error(void) {}\n";
  if (!declares(toks, "assert")) {
    prelude += "void assert(int cond) { if (!(cond)) { ERROR: { reach_error(); abort(); } } }\n";
  }
  if (!declares(toks, "assume")) prelude += "void assume(int cond) { if (!cond) { abort(); } }\n";
  if (prelude.empty()) return body;
  return prelude + "#line 1\n" + body;
}

}  // namespace invkit
