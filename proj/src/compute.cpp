#include "dj/compute.hpp"

#include <algorithm>
#include <exception>
#include <string>

#include "dj/printer.hpp"

namespace dj {

namespace {

std::string key_text(const Relation& key) {
  std::string r = "{";
  for (std::size_t i = 0; i < key.header.attrs.size(); ++i) {
    if (i) r += ", ";
    r += key.header.attrs[i].name + ": " + literal_source(key.rows.front()[i]);
  }
  return r + "}";
}

}  // namespace

std::set<std::string> downstream_of(const Catalog& catalog, const std::string& entity) {
  std::set<std::string> out;
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& [from, to] : catalog.edges()) {
      if ((to == entity || out.count(to)) && !out.count(from)) {
        out.insert(from);
        grew = true;
      }
    }
  }
  return out;
}

UpstreamView::UpstreamView(const Store& store, const std::string& entity)
    : store_(store), hidden_(downstream_of(store.catalog(), entity)) {
  hidden_.insert(entity);
}

const Relation& UpstreamView::base(const std::string& name) const {
  if (hidden_.count(name)) {
    throw Error(ErrorCode::MakeContractViolation, "make may only read upstream entity sets, not " + name);
  }
  return store_.base(name);
}

ast::Condition key_condition(const Relation& key) {
  std::vector<std::pair<std::string, Value>> entries;
  for (std::size_t i = 0; i < key.header.attrs.size(); ++i) {
    entries.emplace_back(key.header.attrs[i].name, key.rows.front()[i]);
  }
  return ast::mapping(std::move(entries));
}

Relation pending_keys(const Store& store, const std::string& entity) {
  const Catalog& catalog = store.catalog();
  Relation domain = eval(primary_dependency_domain(catalog, entity), store);
  Relation existing = eval(ast::project(ast::base(entity), {}), store);
  std::vector<std::size_t> idx;
  for (const auto& a : domain.header.attrs) idx.push_back(*existing.header.index_of(a.name));
  std::set<Row> done;
  for (const auto& r : existing.rows) {
    Row k;
    for (std::size_t i : idx) k.push_back(r[i]);
    done.insert(std::move(k));
  }
  Relation out;
  out.header = domain.header;
  for (const auto& r : domain.rows) {
    if (!done.count(r)) out.rows.push_back(r);
  }
  return out;
}

std::pair<Store, PopulateReport> populate(const Store& store, const std::string& entity, const MakeFn& make) {
  const EntitySetDef& def = store.catalog().get(entity);
  if (def.is_part) throw Error(ErrorCode::PartDirectInsert, entity + " is populated through its master");
  const Relation pending = pending_keys(store, entity);
  const bool single = def.distinguishing_attributes().empty();
  const bool has_parts = !store.catalog().parts_of(entity).empty();
  Store current = store;
  PopulateReport report;
  for (const auto& key_row : pending.rows) {
    Relation key;
    key.header = pending.header;
    key.rows = {key_row};
    try {
      MakeOutput out = make(UpstreamView(current, entity), key);
      if (out.rows.entity.empty()) out.rows.entity = entity;
      if (out.rows.entity != entity) {
        throw Error(ErrorCode::MakeContractViolation, "make for " + entity + " returned rows for " + out.rows.entity);
      }
      if (single && out.rows.rows.size() != 1) {
        throw Error(ErrorCode::MakeContractViolation, entity + " has no distinguishing attributes; make must return one row, got " +
                                                          std::to_string(out.rows.rows.size()));
      }
      std::vector<std::string> attrs = out.rows.attrs;
      if (attrs.empty()) {
        for (const auto& a : def.attributes) attrs.push_back(a.name);
      }
      for (std::size_t k = 0; k < key.header.attrs.size(); ++k) {
        auto it = std::find(attrs.begin(), attrs.end(), key.header.attrs[k].name);
        if (it == attrs.end()) {
          throw Error(ErrorCode::MakeContractViolation, "make output lacks key attribute " + key.header.attrs[k].name);
        }
        const std::size_t col = static_cast<std::size_t>(it - attrs.begin());
        for (const auto& r : out.rows.rows) {
          if (col >= r.size() || !values_equal(conform(def.find(*it)->type, r[col]), key_row[k])) {
            throw Error(ErrorCode::MakeContractViolation, "make output row does not match key " + key_text(key));
          }
        }
      }
      for (auto& part : out.parts) {
        if (part.entity.find('.') == std::string::npos) part.entity = entity + "." + part.entity;
      }
      if (has_parts) {
        current = current.insert_master(out.rows, out.parts);
      } else {
        if (!out.parts.empty()) throw Error(ErrorCode::UnknownPart, entity + " has no parts");
        current = current.insert(out.rows);
      }
      ++report.made;
    } catch (const Error& e) {
      report.errors.emplace_back(key_row, e.what());
    } catch (const std::exception& e) {
      report.errors.emplace_back(key_row, std::string("MakeFailed: ") + e.what());
    }
  }
  return {std::move(current), std::move(report)};
}

MakeFn declarative_make(const std::string& entity, ast::Query body) {
  return [entity, body](const RelationSource& upstream, const Relation& key) {
    Relation rel = eval(ast::restrict(body, key_condition(key)), upstream);
    const EntitySetDef& def = upstream.catalog().get(entity);
    MakeOutput out;
    out.rows.entity = entity;
    std::vector<std::size_t> idx;
    for (const auto& a : def.attributes) {
      if (auto i = rel.header.index_of(a.name)) {
        out.rows.attrs.push_back(a.name);
        idx.push_back(*i);
      }
    }
    for (const auto& r : rel.rows) {
      Row row;
      for (std::size_t i : idx) row.push_back(r[i]);
      out.rows.rows.push_back(std::move(row));
    }
    return out;
  };
}

const MakeFn& MakeRegistry::get(const std::string& entity) const {
  auto it = makes_.find(entity);
  if (it == makes_.end()) throw Error(ErrorCode::NoMakeRegistered, "no make registered for " + entity);
  return it->second;
}

}  // namespace dj
