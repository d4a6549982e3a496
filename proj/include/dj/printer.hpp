#pragma once

#include <string>

#include "dj/ast.hpp"

namespace dj {

// Canonical DataJoint source for AST nodes. Output re-parses to a structurally
// identical tree; parentheses are emitted only where precedence requires them.

std::string to_source(const ast::Query& q);
std::string to_source(const ast::Condition& c);
std::string to_source(const ast::Scalar& s);
std::string to_source(const ast::EntityDecl& decl);
std::string literal_source(const Value& v);

std::string_view to_string(ast::CmpOp op);
std::string_view to_string(ast::ArithOp op);

}  // namespace dj
