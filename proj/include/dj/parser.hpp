#pragma once

#include <string_view>
#include <vector>

#include "dj/ast.hpp"

namespace dj {

/// Parses a whole script. Statements come back in source order. On syntax
/// errors the parser skips to the next `::` or blank line, keeps going, and
/// finally throws ParseError carrying every diagnostic.
std::vector<ast::Statement> parse_script(std::string_view source);

/// Parses a single query expression; the whole input must be consumed.
ast::Query parse_query(std::string_view source);

/// Parses a restriction condition as it would appear after `&`; further `&`/`\` terms form a conjunction.
ast::Condition parse_condition(std::string_view source);

}  // namespace dj
