#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dj/ast.hpp"
#include "dj/header.hpp"

namespace dj {

struct AttributeSpec {
  std::string name;
  Datatype type;
  LineageSet lineage;
  bool primary = false;
  bool nullable = false;
  std::optional<Value> default_value;
  std::string comment;
  bool foreign = false;  // copied in through a dependency
};

struct ResolvedDependency {
  ast::Query target;
  std::vector<std::string> fk_attrs;   // in the dependent; same names as the target key
  std::vector<std::string> bases;      // base entity sets mentioned by the target
  bool primary = false;
  bool unique = false;
  bool nullable = false;
  bool is_master = false;

  bool is_base() const;                // target is a plain entity set name
  bool is_restricted() const;          // target contains a restriction
  bool is_union() const;               // target contains a union
};

struct EntitySetDef {
  std::string name;
  std::vector<AttributeSpec> attributes;
  std::vector<std::string> primary_key;
  std::vector<ResolvedDependency> dependencies;
  std::vector<std::vector<std::string>> indexes;  // bookkeeping only
  bool is_part = false;
  std::string master;
  ast::EntityDecl decl;

  const AttributeSpec* find(const std::string& attr) const;
  Header header() const;
  /// Primary attributes that originate in this entity set.
  std::vector<std::string> distinguishing_attributes() const;
  std::vector<const ResolvedDependency*> primary_dependencies() const;
};

/// Immutable schema. declare() returns an extended copy; definitions are shared
/// between copies.
class Catalog {
 public:
  Catalog declare(const ast::EntityDecl& decl) const;

  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  /// Throws Error(UnknownReference).
  const EntitySetDef& get(const std::string& name) const;
  /// Declaration order.
  std::vector<std::string> names() const;
  std::size_t size() const { return defs_.size(); }
  std::vector<std::string> parts_of(const std::string& master) const;
  /// dependent -> referenced base set, one per ordered pair, declaration order.
  std::vector<std::pair<std::string, std::string>> edges() const;

 private:
  std::vector<std::shared_ptr<const EntitySetDef>> defs_;
  std::map<std::string, std::size_t> index_;
};

bool is_singleton(const Catalog& catalog, const std::string& name);

/// Join of `.proj()` of every primary dependency target, or U() when the
/// entity set has none.
ast::Query primary_dependency_domain(const Catalog& catalog, const std::string& name);

/// Referenced sets before their dependents; ties broken by declaration order.
std::vector<std::string> topo_order(const Catalog& catalog);

/// Declares every entity in order.
Catalog declare_all(const Catalog& catalog, const std::vector<ast::EntityDecl>& decls);

}  // namespace dj
