#pragma once

#include <string>

#include "dj/parser.hpp"
#include "dj/store.hpp"
#include "test_util.hpp"

namespace dj::test {

/// Applies declarations and inserts from a script; other statements are ignored.
inline Store apply_script(Store store, const std::string& script) {
  for (const auto& st : parse_script(script)) {
    if (const auto* decl = std::get_if<ast::EntityDecl>(&st.node)) {
      store = store.declare(*decl);
    } else if (const auto* m = std::get_if<ast::Manipulation>(&st.node)) {
      if (const auto* ins = std::get_if<ast::Insert>(m)) {
        store = ins->parts.empty() ? store.insert(ins->main) : store.insert_master(ins->main, ins->parts);
      }
    }
  }
  return store;
}

inline Store university_schema() { return apply_script(Store{}, read_data("university_schema.dj")); }
inline Store university() { return apply_script(university_schema(), read_data("university_seed.dj")); }
inline Store order_schema() { return apply_script(Store{}, read_data("order_schema.dj")); }

inline ast::Query q(const std::string& text) { return parse_query(text); }

}  // namespace dj::test
