#pragma once

#include <string>

#include "dj/ast.hpp"
#include "dj/catalog.hpp"

namespace dj {

/// `MySQL` keeps attribute comments as COMMENT clauses and native enum
/// columns. `Generic` drops comments and spells enums as checked varchars, so
/// the output runs on engines such as SQLite.
enum class Dialect { Generic, MySQL };

struct SqlOptions {
  Dialect dialect = Dialect::MySQL;
  bool cascade = true;  // ON DELETE CASCADE on foreign keys
};

/// `Order.Item` becomes `Order__Item`.
std::string sql_table_name(const std::string& entity);
std::string quote_identifier(const std::string& name, Dialect dialect);
std::string sql_literal(const Value& v, Dialect dialect);

/// One CREATE TABLE statement. An empty primary key becomes a constant
/// `_omega` column so the table holds at most one row.
std::string ddl_to_sql(const Catalog& catalog, const std::string& entity, const SqlOptions& options = {});
/// Every table in dependency order.
std::string schema_to_sql(const Catalog& catalog, const SqlOptions& options = {});

/// A SELECT statement equivalent to the query. Relations with an empty primary
/// key carry a `_omega` column whose value is always '1'.
std::string query_to_sql(const Catalog& catalog, const ast::Query& q, const SqlOptions& options = {});

std::string manipulation_to_sql(const Catalog& catalog, const ast::Manipulation& m, const SqlOptions& options = {});

}  // namespace dj
