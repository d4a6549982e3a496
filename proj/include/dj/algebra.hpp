#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "dj/ast.hpp"
#include "dj/catalog.hpp"
#include "dj/header.hpp"

namespace dj {

/// Header plus rows. Rows are kept sorted and duplicate-free; since primary
/// attributes lead the header, the order is primary-key order.
struct Relation {
  Header header;
  std::vector<Row> rows;

  void canonicalize();
  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
};

/// Anything that can hand out base relations for evaluation.
class RelationSource {
 public:
  virtual ~RelationSource() = default;
  virtual const Catalog& catalog() const = 0;
  /// Throws Error(UnknownReference) for undeclared names.
  virtual const Relation& base(const std::string& name) const = 0;
};

/// Static analysis with memoization per node. Reports NotJoinable,
/// UnionIncompatible, AmbiguousAttribute, UnknownAttribute,
/// AggrFnOutsideAggregate, PrimaryRenameCollision, DuplicateOutputName,
/// TypeMismatch, InvalidUniversalUse and UnknownReference as Error.
class Analyzer {
 public:
  explicit Analyzer(const Catalog& catalog) : catalog_(catalog) {}
  const Header& header(const ast::Query& q);

 private:
  Header compute(const ast::Query& q);
  void check_condition(const ast::Condition& c, const Header& h);

  const Catalog& catalog_;
  std::unordered_map<const ast::QueryNode*, Header> memo_;
};

Header analyze(const ast::Query& q, const Catalog& catalog);

/// Evaluates over a consistent source; never mutates it.
Relation eval(const ast::Query& q, const RelationSource& source);

/// Rows of `rel` satisfying (or, for Exclude, failing) the condition.
Relation eval_restrict(const Relation& rel, const ast::Condition& cond, ast::Polarity polarity,
                       const RelationSource& source);

/// Entity-normalization audit of one relation: canonical row order, unique
/// primary key values, no nulls in primary attributes, row arity.
std::vector<std::string> audit_relation(const Relation& rel);

/// Reads a value by attribute name; throws UnknownAttribute.
const Value& value_of(const Relation& rel, const Row& row, const std::string& attr);

}  // namespace dj
