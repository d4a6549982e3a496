#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "dj/algebra.hpp"
#include "dj/ast.hpp"
#include "dj/catalog.hpp"

namespace dj {

/// Rows removed per entity set by one delete, in topological order.
struct DeleteReport {
  std::vector<std::pair<std::string, std::size_t>> counts;
  std::size_t total() const;
  std::size_t count(const std::string& entity) const;
};

/// Immutable store snapshot. Every mutation returns a new Store with an
/// incremented generation and leaves the receiver untouched, so a failed
/// operation is atomic by construction.
class Store : public RelationSource {
 public:
  Store() = default;

  const Catalog& catalog() const override { return catalog_; }
  const Relation& base(const std::string& name) const override;
  std::uint64_t generation() const { return generation_; }

  Store declare(const ast::EntityDecl& decl) const;

  /// Empty attrs in the block means every attribute in declaration order.
  Store insert(const ast::InsertBlock& block) const;
  /// Master rows and part rows committed together.
  Store insert_master(const ast::InsertBlock& master, const std::vector<ast::InsertBlock>& parts) const;
  std::pair<Store, DeleteReport> remove(const std::string& entity, const ast::Condition& cond) const;
  Store update(const std::string& entity, const ast::Condition& cond,
               const std::vector<std::pair<std::string, Value>>& assignments) const;

  /// Empty on every store reachable through the public mutations.
  std::vector<std::string> audit() const;

  /// Replaces rows without any checks; for negative tests and loading.
  Store with_rows(const std::string& entity, std::vector<Row> rows) const;

  Store with_generation(std::uint64_t generation) const;

  bool operator==(const Store& other) const;

 private:
  Store add_rows(const ast::InsertBlock& block, bool part_allowed) const;
  Store bumped() const;

  Catalog catalog_;
  std::map<std::string, std::shared_ptr<const Relation>> relations_;
  std::uint64_t generation_ = 0;
};

/// Single-writer, multi-reader holder of the current snapshot.
class Database {
 public:
  Database() : current_(std::make_shared<const Store>()) {}
  explicit Database(Store store) : current_(std::make_shared<const Store>(std::move(store))) {}

  std::shared_ptr<const Store> snapshot() const;

  /// Applies `op` to the current snapshot under the writer lock and publishes
  /// the result; on exception nothing is published.
  template <class Op>
  auto commit(Op&& op) {
    std::lock_guard writer(write_mutex_);
    auto base = snapshot();
    auto result = op(*base);
    publish(store_of(result));
    return result;
  }

 private:
  static const Store& store_of(const Store& s) { return s; }
  template <class T>
  static const Store& store_of(const std::pair<Store, T>& p) {
    return p.first;
  }
  void publish(const Store& s);

  mutable std::mutex read_mutex_;
  std::mutex write_mutex_;
  std::shared_ptr<const Store> current_;
};

/// Keys of the dependency target projected onto its key attributes, as used
/// for referential checks. With `stripped`, restrictions are ignored.
std::vector<Row> dependency_keys(const Store& store, const ResolvedDependency& dep, bool stripped);

// ---- persistence -------------------------------------------------------------

/// A store directory: manifest.json plus one CSV file per entity set.
struct SavedState {
  Store store;
  std::map<std::string, std::string> makes;  // entity -> declarative make body source
};

void save_store(const std::filesystem::path& dir, const Store& store,
                const std::map<std::string, std::string>& makes = {});
/// Throws Error(PersistenceError) on malformed files or a failing audit.
SavedState load_store(const std::filesystem::path& dir);

std::string csv_escape(const std::string& field);
struct CsvField {
  std::string text;
  bool quoted = false;
};
/// RFC 4180 records; quoted fields may span lines.
std::vector<std::vector<CsvField>> csv_parse(const std::string& text);

}  // namespace dj
