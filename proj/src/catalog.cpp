#include "dj/catalog.hpp"

#include <algorithm>
#include <set>

#include "dj/algebra.hpp"
#include "dj/printer.hpp"

namespace dj {

namespace {

using namespace ast;

bool mentions(const Query& q, bool (*pred)(const QueryNode&)) {
  if (pred(*q)) return true;
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Restriction> || std::is_same_v<T, Projection>) {
          return mentions(n.operand, pred);
        } else if constexpr (std::is_same_v<T, Join> || std::is_same_v<T, UnionOf>) {
          return mentions(n.left, pred) || mentions(n.right, pred);
        } else if constexpr (std::is_same_v<T, Aggregation>) {
          return mentions(n.operand, pred) || mentions(n.source, pred);
        } else {
          return false;
        }
      },
      q->node);
}

bool has_universal(const Query& q) {
  return mentions(q, [](const QueryNode& n) { return std::holds_alternative<Universal>(n.node); });
}

}  // namespace

bool ResolvedDependency::is_base() const { return std::holds_alternative<BaseRef>(target->node); }

bool ResolvedDependency::is_restricted() const {
  return mentions(target, [](const QueryNode& n) { return std::holds_alternative<Restriction>(n.node); });
}

bool ResolvedDependency::is_union() const {
  return mentions(target, [](const QueryNode& n) { return std::holds_alternative<UnionOf>(n.node); });
}

const AttributeSpec* EntitySetDef::find(const std::string& attr) const {
  for (const auto& a : attributes) {
    if (a.name == attr) return &a;
  }
  return nullptr;
}

Header EntitySetDef::header() const {
  Header h;
  h.entity_type = name;
  for (const auto& a : attributes) {
    if (a.primary) h.attrs.push_back(Attribute{a.name, a.type, a.lineage, true, false, false});
  }
  for (const auto& a : attributes) {
    if (!a.primary) h.attrs.push_back(Attribute{a.name, a.type, a.lineage, false, a.nullable, false});
  }
  return h;
}

std::vector<std::string> EntitySetDef::distinguishing_attributes() const {
  std::vector<std::string> out;
  for (const auto& a : attributes) {
    if (!a.primary || a.foreign) continue;
    out.push_back(a.name);
  }
  return out;
}

std::vector<const ResolvedDependency*> EntitySetDef::primary_dependencies() const {
  std::vector<const ResolvedDependency*> out;
  for (const auto& d : dependencies) {
    if (d.primary) out.push_back(&d);
  }
  return out;
}

const EntitySetDef& Catalog::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error(ErrorCode::UnknownReference, "unknown entity set " + name);
  return *defs_[it->second];
}

std::vector<std::string> Catalog::names() const {
  std::vector<std::string> out;
  for (const auto& d : defs_) out.push_back(d->name);
  return out;
}

std::vector<std::string> Catalog::parts_of(const std::string& master) const {
  std::vector<std::string> out;
  for (const auto& d : defs_) {
    if (d->is_part && d->master == master) out.push_back(d->name);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> Catalog::edges() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& d : defs_) {
    for (const auto& dep : d->dependencies) {
      for (const auto& b : dep.bases) {
        std::pair<std::string, std::string> e{d->name, b};
        if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
      }
    }
  }
  return out;
}

Catalog Catalog::declare(const EntityDecl& decl) const {
  const std::string& name = decl.name;
  if (contains(name)) throw Error(ErrorCode::DuplicateEntityName, name + " is already declared");

  auto def = std::make_shared<EntitySetDef>();
  def->name = name;
  def->decl = decl;
  def->is_part = decl.is_part();

  if (def->is_part) {
    def->master = decl.master_name();
    if (!contains(def->master)) throw Error(ErrorCode::UnknownReference, "master " + def->master + " of " + name);
    if (get(def->master).is_part) {
      throw Error(ErrorCode::NestedMasterPart, def->master + " is itself a part; parts cannot have parts");
    }
    const auto* first = decl.primary_items.empty() ? nullptr : std::get_if<DependencyDecl>(&decl.primary_items[0]);
    if (first == nullptr || !first->is_master) {
      throw Error(ErrorCode::PartWithoutMasterDep, name + " must begin with -> master");
    }
  }

  auto add_attribute = [&](AttributeSpec spec) { def->attributes.push_back(std::move(spec)); };

  auto declare_items = [&](const std::vector<DeclItem>& items, bool primary) {
    for (const auto& item : items) {
      if (const auto* a = std::get_if<AttrDecl>(&item)) {
        if (def->find(a->name)) throw Error(ErrorCode::DuplicateAttribute, name + "." + a->name + " declared twice");
        AttributeSpec spec;
        spec.name = a->name;
        spec.type = a->type;
        try {
          validate_datatype(a->type);
        } catch (const Error& e) {
          throw Error(ErrorCode::InvalidDeclaration, name + "." + a->name + ": " + e.detail());
        }
        spec.lineage = {Lineage{name, a->name, next_lineage_serial()}};
        spec.primary = primary;
        spec.comment = a->comment;
        if (a->default_value) {
          if (is_null(*a->default_value)) {
            if (primary) {
              throw Error(ErrorCode::InvalidDeclaration, "primary attribute " + name + "." + a->name + " cannot be null");
            }
            spec.nullable = true;
            spec.default_value = Null{};
          } else {
            try {
              spec.default_value = conform(a->type, *a->default_value);
            } catch (const Error& e) {
              throw Error(ErrorCode::InvalidDeclaration, "default of " + name + "." + a->name + ": " + e.detail());
            }
          }
        }
        add_attribute(std::move(spec));
        continue;
      }
      const auto& d = std::get<DependencyDecl>(item);
      if (d.nullable && primary) {
        throw Error(ErrorCode::NullablePrimaryDependency, "only secondary dependencies may be nullable (" + name + ")");
      }
      if (d.is_master && !def->is_part) {
        throw Error(ErrorCode::InvalidDeclaration, "-> master outside a part declaration");
      }
      if (d.is_master && (!primary || &item != &decl.primary_items.front())) {
        throw Error(ErrorCode::PartWithoutMasterDep, "-> master must be the first primary item of " + name);
      }
      ResolvedDependency dep;
      dep.target = d.target;
      dep.primary = primary;
      dep.unique = d.unique;
      dep.nullable = d.nullable;
      dep.is_master = d.is_master;
      dep.bases = base_names(d.target);
      for (const auto& b : dep.bases) {
        if (b == name) throw Error(ErrorCode::CycleWouldForm, name + " cannot depend on itself");
        if (!contains(b)) throw Error(ErrorCode::UnknownReference, "dependency of " + name + " on undeclared " + b);
      }
      if (has_universal(d.target)) {
        throw Error(ErrorCode::InvalidDeclaration, "dependency targets cannot use universal sets");
      }
      for (const auto& prior : def->dependencies) {
        if (equal(prior.target, dep.target)) {
          throw Error(ErrorCode::InvalidDeclaration, name + " declares the dependency -> " + to_source(d.target) + " twice");
        }
      }
      const Header target = analyze(d.target, *this);
      for (const auto& key : target.attrs) {
        if (!key.primary) continue;
        dep.fk_attrs.push_back(key.name);
        if (const AttributeSpec* existing = def->find(key.name)) {
          if (existing->foreign && existing->type == key.type && intersects(existing->lineage, key.lineage)) continue;
          throw Error(ErrorCode::DuplicateAttribute,
                      name + "." + key.name + " conflicts with an attribute of the same name");
        }
        AttributeSpec spec;
        spec.name = key.name;
        spec.type = key.type;
        spec.lineage = key.lineage;
        spec.primary = primary;
        spec.nullable = d.nullable;
        spec.foreign = true;
        if (d.nullable) spec.default_value = Null{};
        add_attribute(std::move(spec));
      }
      def->dependencies.push_back(std::move(dep));
    }
  };

  declare_items(decl.primary_items, true);
  declare_items(decl.secondary_items, false);

  for (const auto& a : def->attributes) {
    if (a.primary) def->primary_key.push_back(a.name);
  }
  for (const auto& dep : def->dependencies) {
    if (dep.fk_attrs.empty()) continue;
    auto prefix_of = [&](const std::vector<std::string>& idx) {
      return idx.size() >= dep.fk_attrs.size() && std::equal(dep.fk_attrs.begin(), dep.fk_attrs.end(), idx.begin());
    };
    if (prefix_of(def->primary_key)) continue;
    if (std::any_of(def->indexes.begin(), def->indexes.end(), prefix_of)) continue;
    def->indexes.push_back(dep.fk_attrs);
  }

  Catalog next = *this;
  next.index_.emplace(name, next.defs_.size());
  next.defs_.push_back(std::move(def));
  if (topo_order(next).size() != next.size()) {
    throw Error(ErrorCode::CycleWouldForm, "declaring " + name + " would create a dependency cycle");
  }
  return next;
}

bool is_singleton(const Catalog& catalog, const std::string& name) {
  const EntitySetDef& def = catalog.get(name);
  std::size_t capacity = 1;
  for (const auto& key : def.primary_key) {
    const AttributeSpec* a = def.find(key);
    if (a->type.kind != Datatype::Kind::Enum) return false;
    capacity *= a->type.enum_values.size();
  }
  return capacity == 1;
}

Query primary_dependency_domain(const Catalog& catalog, const std::string& name) {
  const EntitySetDef& def = catalog.get(name);
  Query domain;
  for (const auto* dep : def.primary_dependencies()) {
    Query p = project(dep->target, {});
    domain = domain ? join(domain, p) : p;
  }
  return domain ? domain : universal({});
}

std::vector<std::string> topo_order(const Catalog& catalog) {
  const auto names = catalog.names();
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < names.size(); ++i) pos[names[i]] = i;
  std::vector<std::set<std::size_t>> upstream(names.size());
  for (const auto& [from, to] : catalog.edges()) {
    if (pos.count(to)) upstream[pos[from]].insert(pos[to]);
  }
  std::vector<bool> done(names.size(), false);
  std::vector<std::string> out;
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (done[i]) continue;
      if (std::all_of(upstream[i].begin(), upstream[i].end(), [&](std::size_t u) { return done[u]; })) {
        done[i] = true;
        out.push_back(names[i]);
        progress = true;
        break;
      }
    }
  }
  return out;
}

Catalog declare_all(const Catalog& catalog, const std::vector<EntityDecl>& decls) {
  Catalog c = catalog;
  for (const auto& d : decls) c = c.declare(d);
  return c;
}

}  // namespace dj
