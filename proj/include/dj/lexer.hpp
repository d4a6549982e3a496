#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dj/error.hpp"

namespace dj {

enum class TokenKind { Identifier, Number, String, Symbol, Comment, Keyword, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;  // decoded: strings without quotes, comments without '#'
  int line = 1;
  int column = 1;
  std::size_t offset = 0;  // byte span of the raw token in the source
  std::size_t end = 0;

  SourcePos pos() const { return {line, column}; }
  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool is_symbol(std::string_view t) const { return is(TokenKind::Symbol, t); }
  bool is_keyword(std::string_view t) const { return is(TokenKind::Keyword, t); }
};

std::string_view to_string(TokenKind kind);

/// Reserved words. Datatype names and aggregation functions are included so
/// that they can never be attribute names.
bool is_keyword(std::string_view word);
bool is_aggregate_function(std::string_view word);

/// Splits DataJoint script text into tokens. Comments are kept as Comment
/// tokens; the list always ends with an End token. Unquoted ISO dates such as
/// 1997-09-13 are String tokens.
std::vector<Token> tokenize(std::string_view source);

}  // namespace dj
