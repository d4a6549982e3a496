#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dj/error.hpp"
#include "dj/value.hpp"

namespace dj::ast {

// Nodes are immutable and shared: a query bound to a variable is reused by
// reference wherever the variable appears.

struct ScalarNode;
struct ConditionNode;
struct QueryNode;
using Scalar = std::shared_ptr<const ScalarNode>;
using Condition = std::shared_ptr<const ConditionNode>;
using Query = std::shared_ptr<const QueryNode>;

// ---- scalar expressions ----------------------------------------------------

struct AttrRef {
  std::string name;
};
struct Literal {
  Value value;
};
enum class ArithOp { Add, Sub, Mul, Div };
struct Arith {
  ArithOp op;
  Scalar lhs;
  Scalar rhs;
};
struct Negate {
  Scalar operand;
};
/// Aggregation call such as count() or percentile(90, x).
struct Call {
  std::string fn;
  std::vector<Scalar> args;
};

struct ScalarNode {
  std::variant<AttrRef, Literal, Arith, Negate, Call> node;
  SourcePos pos;
};

// ---- conditions ------------------------------------------------------------

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge, In };
struct Cmp {
  CmpOp op;
  Scalar lhs;
  Scalar rhs;                   // unused for In
  std::vector<Value> in_values;  // only for In
};
/// {key: value, ...}; keys that are not attributes of the operand are ignored.
struct Mapping {
  std::vector<std::pair<std::string, Value>> entries;
};
/// [c1, ..., cN]: disjunction. Empty is false.
struct OrList {
  std::vector<Condition> items;
};
/// And([c1, ..., cN]): conjunction. Empty is true.
struct AndFn {
  std::vector<Condition> items;
};
struct NotFn {
  Condition operand;
};
struct SubqueryCond {
  Query query;
};

struct ConditionNode {
  std::variant<Cmp, Mapping, OrList, AndFn, NotFn, SubqueryCond> node;
  SourcePos pos;
};

// ---- queries ---------------------------------------------------------------

enum class Polarity { Restrict, Exclude };

struct BaseRef {
  std::string name;
};
struct Restriction {
  Query operand;
  Condition cond;
  Polarity polarity;
};
struct Join {
  Query left;
  Query right;
};

struct ProjItem {
  enum class Kind { Keep, Rename, Compute, AggrCompute };
  Kind kind = Kind::Keep;
  std::string name;    // output name (or kept name)
  std::string source;  // renamed attribute, for Rename
  Scalar expr;         // for Compute / AggrCompute
};

struct Projection {
  Query operand;
  std::vector<ProjItem> items;
  bool ellipsis = false;
};
struct Aggregation {
  Query operand;
  Query source;
  std::vector<ProjItem> items;
  bool ellipsis = false;
};
struct UnionOf {
  Query left;
  Query right;
};
struct Universal {
  std::vector<std::string> attrs;
};

struct QueryNode {
  std::variant<BaseRef, Restriction, Join, Projection, Aggregation, UnionOf, Universal> node;
  SourcePos pos;
};

// ---- declarations and manipulations ----------------------------------------

struct AttrDecl {
  std::string name;
  Datatype type;
  std::optional<Value> default_value;  // holds Null for `= null`
  std::string comment;
  SourcePos pos;
};

struct DependencyDecl {
  bool unique = false;
  bool nullable = false;
  bool is_master = false;  // written as `-> master`
  Query target;
  SourcePos pos;
};

using DeclItem = std::variant<AttrDecl, DependencyDecl>;

struct EntityDecl {
  std::string name;  // `Name` or `Master.Part`
  std::vector<DeclItem> primary_items;
  std::vector<DeclItem> secondary_items;
  bool has_divider = false;
  SourcePos pos;

  bool is_part() const { return name.find('.') != std::string::npos; }
  std::string master_name() const { return name.substr(0, name.rfind('.')); }
};

struct InsertBlock {
  std::string entity;
  std::vector<std::string> attrs;  // empty: all attributes in declaration order
  std::vector<Row> rows;
};
/// `insert E (...): rows [with E.Part (...): rows]...`
struct Insert {
  InsertBlock main;
  std::vector<InsertBlock> parts;
};
struct Delete {
  std::string entity;
  Condition cond;
};
struct Update {
  std::string entity;
  Condition cond;
  std::vector<std::pair<std::string, Value>> assignments;
};
struct Populate {
  std::string entity;
};
using Manipulation = std::variant<Insert, Delete, Update, Populate>;

/// `name = query`
struct Assignment {
  std::string name;
  Query expr;
};
/// `make Entity = query`: a declarative make body.
struct MakeDecl {
  std::string entity;
  Query body;
};

struct Statement {
  std::variant<EntityDecl, Manipulation, Query, Assignment, MakeDecl> node;
  SourcePos pos;
  std::string text;  // source slice of the statement
};

// ---- construction helpers --------------------------------------------------

Scalar attr(std::string name);
Scalar lit(Value v);
Scalar arith(ArithOp op, Scalar a, Scalar b);
Scalar call(std::string fn, std::vector<Scalar> args);

Condition cmp(CmpOp op, Scalar lhs, Scalar rhs);
Condition in_list(Scalar lhs, std::vector<Value> values);
Condition mapping(std::vector<std::pair<std::string, Value>> entries);
Condition any_of(std::vector<Condition> items);
Condition all_of(std::vector<Condition> items);
Condition negate(Condition c);
Condition subquery(Query q);

Query base(std::string name);
Query restrict(Query operand, Condition cond);
Query exclude(Query operand, Condition cond);
Query join(Query a, Query b);
Query project(Query operand, std::vector<ProjItem> items, bool ellipsis = false);
Query aggregate(Query operand, Query source, std::vector<ProjItem> items, bool ellipsis = false);
Query unite(Query a, Query b);
Query universal(std::vector<std::string> attrs);

ProjItem keep(std::string name);
ProjItem rename(std::string name, std::string source);
ProjItem compute(std::string name, Scalar expr);

bool contains_aggregate(const Scalar& s);

// Structural equality, ignoring source positions.
bool equal(const Scalar& a, const Scalar& b);
bool equal(const Condition& a, const Condition& b);
bool equal(const Query& a, const Query& b);

/// Base entity set names mentioned anywhere in the expression, in first-seen
/// order.
std::vector<std::string> base_names(const Query& q);

/// Replaces each BaseRef for which `lookup` returns a non-null query with that
/// query. Used for variable substitution.
Query substitute(const Query& q, const std::function<Query(const std::string&)>& lookup);

/// Drops every Restriction node, keeping operands. Used where restrictions
/// must not matter (delete cascades, referential audits).
Query strip_restrictions(const Query& q);

}  // namespace dj::ast
