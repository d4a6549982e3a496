#include "dj/store.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "dj/printer.hpp"

namespace dj {

namespace {

using KeySet = std::unordered_set<Row, RowHash>;

std::string key_text(const Row& key) {
  std::string r = "(";
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (i) r += ", ";
    r += std::holds_alternative<std::string>(key[i]) ? literal_source(key[i]) : format_value(key[i]);
  }
  return r + ")";
}

std::vector<std::size_t> indexes_of(const Header& h, const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  for (const auto& n : names) out.push_back(*h.index_of(n));
  return out;
}

// Projection of a row onto positions; nullopt when any is null.
std::optional<Row> project_row(const Row& r, const std::vector<std::size_t>& idx) {
  Row k;
  k.reserve(idx.size());
  for (std::size_t i : idx) {
    if (is_null(r[i])) return std::nullopt;
    k.push_back(r[i]);
  }
  return k;
}

bool any_null(const Row& r, const std::vector<std::size_t>& idx) {
  return std::any_of(idx.begin(), idx.end(), [&](std::size_t i) { return is_null(r[i]); });
}

bool all_null(const Row& r, const std::vector<std::size_t>& idx) {
  return std::all_of(idx.begin(), idx.end(), [&](std::size_t i) { return is_null(r[i]); });
}

KeySet key_set(const std::vector<Row>& keys) { return KeySet(keys.begin(), keys.end()); }

Row primary_key(const Row& r, std::size_t pk) { return Row(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(pk)); }

std::string dependency_text(const EntitySetDef& def, const ResolvedDependency& dep) {
  return def.name + " -> " + (dep.is_master ? def.master : to_source(dep.target));
}

}  // namespace

std::size_t DeleteReport::total() const {
  std::size_t n = 0;
  for (const auto& [_, c] : counts) n += c;
  return n;
}

std::size_t DeleteReport::count(const std::string& entity) const {
  for (const auto& [name, c] : counts) {
    if (name == entity) return c;
  }
  return 0;
}

const Relation& Store::base(const std::string& name) const {
  auto it = relations_.find(name);
  if (it == relations_.end()) throw Error(ErrorCode::UnknownReference, "unknown entity set " + name);
  return *it->second;
}

Store Store::bumped() const {
  Store s = *this;
  ++s.generation_;
  return s;
}

Store Store::declare(const ast::EntityDecl& decl) const {
  Store next = bumped();
  next.catalog_ = catalog_.declare(decl);
  auto rel = std::make_shared<Relation>();
  rel->header = next.catalog_.get(decl.name).header();
  next.relations_[decl.name] = std::move(rel);
  return next;
}

std::vector<Row> dependency_keys(const Store& store, const ResolvedDependency& dep, bool stripped) {
  const ast::Query target = stripped ? ast::strip_restrictions(dep.target) : dep.target;
  Relation rel = eval(target, store);
  const auto idx = indexes_of(rel.header, dep.fk_attrs);
  std::vector<Row> keys;
  keys.reserve(rel.rows.size());
  for (const auto& r : rel.rows) {
    if (auto k = project_row(r, idx)) keys.push_back(std::move(*k));
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

Store Store::add_rows(const ast::InsertBlock& block, bool part_allowed) const {
  const EntitySetDef& def = catalog_.get(block.entity);
  if (def.is_part && !part_allowed) {
    throw Error(ErrorCode::PartDirectInsert, block.entity + " is a part; insert it together with its master " + def.master);
  }
  std::vector<std::string> attrs = block.attrs;
  if (attrs.empty()) {
    for (const auto& a : def.attributes) attrs.push_back(a.name);
  }
  std::set<std::string> seen;
  for (const auto& a : attrs) {
    if (!def.find(a)) throw Error(ErrorCode::UnknownAttribute, block.entity + " has no attribute " + a);
    if (!seen.insert(a).second) throw Error(ErrorCode::DuplicateAttribute, "attribute " + a + " listed twice");
  }
  const Relation& current = base(block.entity);
  const Header& header = current.header;
  // column of each header attribute in the block, or -1 for defaults
  std::vector<int> column;
  for (const auto& attr : header.attrs) {
    auto it = std::find(attrs.begin(), attrs.end(), attr.name);
    if (it != attrs.end()) {
      column.push_back(static_cast<int>(it - attrs.begin()));
      continue;
    }
    if (!def.find(attr.name)->default_value) {
      throw Error(ErrorCode::MissingAttribute, block.entity + "." + attr.name + " has no value and no default");
    }
    column.push_back(-1);
  }

  std::vector<Row> rows;
  rows.reserve(block.rows.size());
  for (const auto& given : block.rows) {
    if (given.size() != attrs.size()) {
      throw Error(ErrorCode::MissingAttribute, "row has " + std::to_string(given.size()) + " values for " +
                                                   std::to_string(attrs.size()) + " attributes");
    }
    Row row;
    row.reserve(header.attrs.size());
    for (std::size_t i = 0; i < header.attrs.size(); ++i) {
      const AttributeSpec& spec = *def.find(header.attrs[i].name);
      const Value& v = column[i] >= 0 ? given[static_cast<std::size_t>(column[i])] : *spec.default_value;
      if (is_null(v) && !spec.nullable) {
        throw Error(ErrorCode::DomainViolation, block.entity + "." + spec.name + " cannot be null");
      }
      try {
        row.push_back(conform(spec.type, v));
      } catch (const Error& e) {
        throw Error(ErrorCode::DomainViolation, block.entity + "." + spec.name + ": " + e.detail());
      }
    }
    rows.push_back(std::move(row));
  }

  const std::size_t pk = header.primary_count();
  KeySet keys;
  for (const auto& r : current.rows) keys.insert(primary_key(r, pk));
  for (const auto& r : rows) {
    Row k = primary_key(r, pk);
    if (!keys.insert(k).second) {
      throw Error(ErrorCode::DuplicateKey, "duplicate primary key " + key_text(k) + " in " + block.entity);
    }
  }

  for (const auto& dep : def.dependencies) {
    const auto idx = indexes_of(header, dep.fk_attrs);
    for (const auto& r : rows) {
      if (!any_null(r, idx) || all_null(r, idx)) continue;
      throw Error(ErrorCode::ReferentialViolation,
                  "nullable reference " + dependency_text(def, dep) + " must be entirely null or entirely set");
    }
    const KeySet targets = key_set(dependency_keys(*this, dep, false));
    for (const auto& r : rows) {
      auto k = project_row(r, idx);
      if (k && !targets.count(*k)) {
        throw Error(ErrorCode::ReferentialViolation,
                    dependency_text(def, dep) + ": no referenced element " + key_text(*k));
      }
    }
    if (dep.unique) {
      KeySet used;
      for (const std::vector<Row>* batch : {&current.rows, static_cast<const std::vector<Row>*>(&rows)}) {
        for (const auto& r : *batch) {
          auto k = project_row(r, idx);
          if (k && !used.insert(*k).second) {
            throw Error(ErrorCode::UniqueDependencyViolation,
                        dependency_text(def, dep) + ": " + key_text(*k) + " is already referenced");
          }
        }
      }
    }
  }

  auto rel = std::make_shared<Relation>(current);
  rel->rows.insert(rel->rows.end(), rows.begin(), rows.end());
  rel->canonicalize();
  Store next = bumped();
  next.relations_[block.entity] = std::move(rel);
  return next;
}

Store Store::insert(const ast::InsertBlock& block) const { return add_rows(block, false); }

Store Store::insert_master(const ast::InsertBlock& master, const std::vector<ast::InsertBlock>& parts) const {
  const EntitySetDef& mdef = catalog_.get(master.entity);
  if (mdef.is_part) throw Error(ErrorCode::PartDirectInsert, master.entity + " is a part, not a master");
  Store staged = add_rows(master, false);
  const Relation& before = base(master.entity);
  const Relation& after = staged.base(master.entity);
  const std::size_t pk = after.header.primary_count();
  KeySet old_keys;
  for (const auto& r : before.rows) old_keys.insert(primary_key(r, pk));
  KeySet new_keys;
  for (const auto& r : after.rows) {
    Row k = primary_key(r, pk);
    if (!old_keys.count(k)) new_keys.insert(std::move(k));
  }
  const auto known = catalog_.parts_of(master.entity);
  for (const auto& part : parts) {
    if (std::find(known.begin(), known.end(), part.entity) == known.end()) {
      throw Error(ErrorCode::UnknownPart, part.entity + " is not a part of " + master.entity);
    }
    const EntitySetDef& pdef = catalog_.get(part.entity);
    Store next = staged.add_rows(part, true);
    const auto& master_dep = pdef.dependencies.front();
    const Relation& prel = next.base(part.entity);
    const auto idx = indexes_of(prel.header, master_dep.fk_attrs);
    const Relation& prior = staged.base(part.entity);
    std::set<Row> prior_rows(prior.rows.begin(), prior.rows.end());
    for (const auto& r : prel.rows) {
      if (prior_rows.count(r)) continue;
      auto k = project_row(r, idx);
      if (!k || !new_keys.count(*k)) {
        throw Error(ErrorCode::UnknownPart,
                    part.entity + " row " + key_text(r) + " does not belong to a master inserted in this transaction");
      }
    }
    staged = std::move(next);
  }
  staged.generation_ = generation_ + 1;
  return staged;
}

std::pair<Store, DeleteReport> Store::remove(const std::string& entity, const ast::Condition& cond) const {
  const EntitySetDef& def = catalog_.get(entity);
  if (def.is_part) {
    throw Error(ErrorCode::PartDirectDelete, entity + " is a part; delete from its master " + def.master);
  }
  const Relation& current = base(entity);
  Relation matched = eval_restrict(current, cond, ast::Polarity::Restrict, *this);
  DeleteReport report;
  const auto order = topo_order(catalog_);
  if (matched.empty()) {
    for (const auto& name : order) report.counts.emplace_back(name, 0);
    return {*this, report};
  }
  Store next = bumped();
  auto kept = std::make_shared<Relation>();
  kept->header = current.header;
  std::set_difference(current.rows.begin(), current.rows.end(), matched.rows.begin(), matched.rows.end(),
                      std::back_inserter(kept->rows));
  next.relations_[entity] = kept;
  std::set<std::string> affected{entity};
  for (const auto& name : order) {
    if (name == entity) {
      report.counts.emplace_back(name, matched.size());
      continue;
    }
    const EntitySetDef& d = catalog_.get(name);
    const Relation& rel = next.base(name);
    std::vector<bool> drop(rel.rows.size(), false);
    bool any = false;
    for (const auto& dep : d.dependencies) {
      if (std::none_of(dep.bases.begin(), dep.bases.end(), [&](const std::string& b) { return affected.count(b); })) {
        continue;
      }
      const KeySet targets = key_set(dependency_keys(next, dep, true));
      const auto idx = indexes_of(rel.header, dep.fk_attrs);
      for (std::size_t i = 0; i < rel.rows.size(); ++i) {
        auto k = project_row(rel.rows[i], idx);
        if (k && !targets.count(*k)) drop[i] = any = true;
      }
    }
    std::size_t removed = 0;
    if (any) {
      auto survivors = std::make_shared<Relation>();
      survivors->header = rel.header;
      for (std::size_t i = 0; i < rel.rows.size(); ++i) {
        if (drop[i]) {
          ++removed;
        } else {
          survivors->rows.push_back(rel.rows[i]);
        }
      }
      next.relations_[name] = std::move(survivors);
      affected.insert(name);
    }
    report.counts.emplace_back(name, removed);
  }
  return {std::move(next), std::move(report)};
}

Store Store::update(const std::string& entity, const ast::Condition& cond,
                    const std::vector<std::pair<std::string, Value>>& assignments) const {
  const EntitySetDef& def = catalog_.get(entity);
  const Relation& current = base(entity);
  std::vector<std::pair<std::size_t, Value>> sets;
  for (const auto& [name, value] : assignments) {
    const AttributeSpec* spec = def.find(name);
    if (!spec) throw Error(ErrorCode::UnknownAttribute, entity + " has no attribute " + name);
    if (spec->primary) throw Error(ErrorCode::PrimaryKeyUpdate, entity + "." + name + " is a primary attribute");
    if (spec->foreign) {
      throw Error(ErrorCode::ForeignKeyUpdate, entity + "." + name + " is a foreign key attribute; delete and reinsert");
    }
    if (is_null(value) && !spec->nullable) {
      throw Error(ErrorCode::DomainViolation, entity + "." + name + " cannot be null");
    }
    try {
      sets.emplace_back(*current.header.index_of(name), conform(spec->type, value));
    } catch (const Error& e) {
      throw Error(ErrorCode::DomainViolation, entity + "." + name + ": " + e.detail());
    }
  }
  Relation matched = eval_restrict(current, cond, ast::Polarity::Restrict, *this);
  std::set<Row> hit(matched.rows.begin(), matched.rows.end());
  auto rel = std::make_shared<Relation>(current);
  for (auto& r : rel->rows) {
    if (!hit.count(r)) continue;
    for (const auto& [i, v] : sets) r[i] = v;
  }
  rel->canonicalize();
  Store next = bumped();
  next.relations_[entity] = std::move(rel);
  return next;
}

std::vector<std::string> Store::audit() const {
  std::vector<std::string> problems;
  for (const auto& name : catalog_.names()) {
    auto it = relations_.find(name);
    if (it == relations_.end()) {
      problems.push_back(name + ": no relation");
      continue;
    }
    const Relation& rel = *it->second;
    const EntitySetDef& def = catalog_.get(name);
    for (const auto& p : audit_relation(rel)) problems.push_back(name + ": " + p);
    for (const auto& r : rel.rows) {
      if (r.size() != rel.header.attrs.size()) continue;
      for (std::size_t i = 0; i < r.size(); ++i) {
        const AttributeSpec& spec = *def.find(rel.header.attrs[i].name);
        if (is_null(r[i])) {
          if (!spec.nullable) problems.push_back(name + "." + spec.name + ": null in non-nullable attribute");
          continue;
        }
        try {
          if (!values_equal(conform(spec.type, r[i]), r[i])) throw Error(ErrorCode::DomainViolation, "not normalized");
        } catch (const Error& e) {
          problems.push_back(name + "." + spec.name + ": " + e.detail());
        }
      }
    }
    for (const auto& dep : def.dependencies) {
      const auto idx = indexes_of(rel.header, dep.fk_attrs);
      const KeySet targets = key_set(dependency_keys(*this, dep, true));
      KeySet used;
      for (const auto& r : rel.rows) {
        if (any_null(r, idx) && !all_null(r, idx)) {
          problems.push_back(dependency_text(def, dep) + ": partially null reference");
        }
        auto k = project_row(r, idx);
        if (!k) continue;
        if (!targets.count(*k)) problems.push_back(dependency_text(def, dep) + ": dangling reference " + key_text(*k));
        if (dep.unique && !used.insert(*k).second) {
          problems.push_back(dependency_text(def, dep) + ": " + key_text(*k) + " referenced twice");
        }
      }
    }
  }
  return problems;
}

Store Store::with_rows(const std::string& entity, std::vector<Row> rows) const {
  auto rel = std::make_shared<Relation>();
  rel->header = base(entity).header;
  rel->rows = std::move(rows);
  rel->canonicalize();
  Store next = *this;
  next.relations_[entity] = std::move(rel);
  return next;
}

Store Store::with_generation(std::uint64_t generation) const {
  Store next = *this;
  next.generation_ = generation;
  return next;
}

bool Store::operator==(const Store& other) const {
  if (generation_ != other.generation_ || catalog_.names() != other.catalog_.names()) return false;
  if (relations_.size() != other.relations_.size()) return false;
  for (const auto& [name, rel] : relations_) {
    auto it = other.relations_.find(name);
    if (it == other.relations_.end()) return false;
    if (rel != it->second && rel->rows != it->second->rows) return false;
  }
  return true;
}

std::shared_ptr<const Store> Database::snapshot() const {
  std::lock_guard lock(read_mutex_);
  return current_;
}

void Database::publish(const Store& s) {
  auto next = std::make_shared<const Store>(s);
  std::lock_guard lock(read_mutex_);
  current_ = std::move(next);
}

}  // namespace dj
