#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dj/algebra.hpp"
#include "dj/store.hpp"

namespace dj {

/// Rows produced by one make call. An empty entity name in a block means the
/// entity being populated.
struct MakeOutput {
  ast::InsertBlock rows;
  std::vector<ast::InsertBlock> parts;
};

/// `key` holds exactly one row over the primary dependency domain.
using MakeFn = std::function<MakeOutput(const RelationSource& upstream, const Relation& key)>;

struct PopulateReport {
  std::size_t made = 0;
  std::vector<std::pair<Row, std::string>> errors;  // failed key, message
};

/// Read-only view hiding the entity set itself and everything downstream of it.
class UpstreamView : public RelationSource {
 public:
  UpstreamView(const Store& store, const std::string& entity);
  const Catalog& catalog() const override { return store_.catalog(); }
  /// Throws Error(MakeContractViolation) for hidden sets.
  const Relation& base(const std::string& name) const override;

 private:
  const Store& store_;
  std::set<std::string> hidden_;
};

/// Entity sets that depend on `entity`, directly or transitively.
std::set<std::string> downstream_of(const Catalog& catalog, const std::string& entity);

/// Mapping condition selecting the single row of `key`.
ast::Condition key_condition(const Relation& key);

/// Keys of the primary dependency domain not yet present in `entity`, sorted.
Relation pending_keys(const Store& store, const std::string& entity);

/// Calls make for every pending key and commits each result atomically.
/// Failures are recorded per key and do not stop the run.
std::pair<Store, PopulateReport> populate(const Store& store, const std::string& entity, const MakeFn& make);

/// A make whose rows are `body & key` restricted to the entity's attributes.
MakeFn declarative_make(const std::string& entity, ast::Query body);

class MakeRegistry {
 public:
  void add(const std::string& entity, MakeFn make) { makes_[entity] = std::move(make); }
  bool contains(const std::string& entity) const { return makes_.count(entity) != 0; }
  /// Throws Error(NoMakeRegistered).
  const MakeFn& get(const std::string& entity) const;

 private:
  std::map<std::string, MakeFn> makes_;
};

}  // namespace dj
