#pragma once

#include <string>

#include "dj/catalog.hpp"

namespace dj {

/// Schema diagram as DOT text, dependencies pointing upward.
///
/// Entity sets are boxes (parts are bare labels). Primary dependencies are
/// solid edges, thick when the dependent shares the referenced primary key;
/// secondary dependencies are dashed. A dependency on a projection or union
/// goes through an orange node labelled with the expression. Joins fan out
/// to one edge per operand and restrictions are drawn as plain edges.
std::string emit_dot(const Catalog& catalog);

}  // namespace dj
