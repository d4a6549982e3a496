#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dj/compute.hpp"
#include "dj/store.hpp"

namespace dj {

/// Result of executing one statement.
struct Outcome {
  enum class Kind { Declared, Inserted, Deleted, Updated, Populated, Queried, Assigned, MakeDefined };
  Kind kind = Kind::Queried;
  std::string message;
  ast::Query query;                // resolved query for Queried/Assigned
  std::optional<Relation> result;  // Queried only
  std::string text;                // statement source
};

/// Statement interpreter holding a store, variables and makes. Variables
/// are substituted eagerly at assignment, so redefining a variable never
/// changes earlier ones.
class Session {
 public:
  Session() = default;
  explicit Session(Store store) : store_(std::move(store)) {}

  Outcome execute(const ast::Statement& statement);
  /// Parses and executes every statement; stops at the first error.
  std::vector<Outcome> run(std::string_view script);
  /// Evaluates a single query expression.
  Relation query(std::string_view text);

  /// Replaces variable names by their definitions. Throws UnknownVariable
  /// for names that are neither variables nor declared entity sets.
  ast::Query resolve(const ast::Query& q) const;
  ast::Condition resolve(const ast::Condition& c) const;

  const Store& store() const { return store_; }
  void set_store(Store store) { store_ = std::move(store); }
  MakeRegistry& makes() { return makes_; }
  /// Declarative make bodies by entity, as source text.
  const std::map<std::string, std::string>& make_sources() const { return make_sources_; }
  void define_make(const std::string& entity, const std::string& body_source);
  const std::map<std::string, ast::Query>& variables() const { return variables_; }

 private:
  Store store_;
  std::map<std::string, ast::Query> variables_;
  MakeRegistry makes_;
  std::map<std::string, std::string> make_sources_;
};

}  // namespace dj
