#include <algorithm>
#include <functional>
#include <set>

#include "dj/algebra.hpp"
#include "dj/lexer.hpp"
#include "dj/printer.hpp"

namespace dj {

namespace {

using namespace ast;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

enum class Class { Int, Real, Text, Any };

Class class_of(const Datatype& t) {
  if (t.kind == Datatype::Kind::Any) return Class::Any;
  if (t.is_integral()) return Class::Int;
  if (t.is_real()) return Class::Real;
  return Class::Text;
}

Datatype datatype_of(Class c) {
  switch (c) {
    case Class::Int: return Datatype::of(Datatype::Kind::Int);
    case Class::Real: return Datatype::of(Datatype::Kind::Double);
    case Class::Text: return Datatype::of(Datatype::Kind::Text);
    default: return Datatype::of(Datatype::Kind::Any);
  }
}

bool is_numeric(Class c) { return c == Class::Int || c == Class::Real || c == Class::Any; }
bool is_date(const Datatype& t) { return t.kind == Datatype::Kind::Date || t.kind == Datatype::Kind::Datetime; }

// Name resolution for scalar expressions. `in_aggregate` is true inside the
// arguments of an aggregation function.
using Resolver = std::function<const Attribute&(const std::string& name, bool in_aggregate)>;

Datatype scalar_type(const Scalar& s, const Resolver& resolve, bool allow_aggregates, bool in_aggregate) {
  return std::visit(
      overloaded{
          [&](const AttrRef& n) { return resolve(n.name, in_aggregate).type; },
          [&](const Literal& n) {
            if (std::holds_alternative<std::int64_t>(n.value)) return datatype_of(Class::Int);
            if (std::holds_alternative<double>(n.value)) return datatype_of(Class::Real);
            if (std::holds_alternative<std::string>(n.value)) return datatype_of(Class::Text);
            return datatype_of(Class::Any);
          },
          [&](const Arith& n) {
            const Class a = class_of(scalar_type(n.lhs, resolve, allow_aggregates, in_aggregate));
            const Class b = class_of(scalar_type(n.rhs, resolve, allow_aggregates, in_aggregate));
            if (a == Class::Text || b == Class::Text) {
              if (n.op == ArithOp::Add && a != Class::Int && a != Class::Real && b != Class::Int && b != Class::Real) {
                return datatype_of(Class::Text);
              }
              throw Error(ErrorCode::TypeMismatch, "arithmetic on text in " + to_source(s));
            }
            if (a == Class::Any || b == Class::Any) return datatype_of(Class::Any);
            if (n.op == ArithOp::Div || a == Class::Real || b == Class::Real) return datatype_of(Class::Real);
            return datatype_of(Class::Int);
          },
          [&](const Negate& n) {
            const Class a = class_of(scalar_type(n.operand, resolve, allow_aggregates, in_aggregate));
            if (!is_numeric(a)) throw Error(ErrorCode::TypeMismatch, "negation of text in " + to_source(s));
            return datatype_of(a);
          },
          [&](const Call& n) {
            if (!allow_aggregates) {
              throw Error(ErrorCode::AggrFnOutsideAggregate, n.fn + "() is only allowed in aggr definitions");
            }
            if (in_aggregate) throw Error(ErrorCode::AggrFnOutsideAggregate, "nested aggregation " + to_source(s));
            std::vector<Datatype> args;
            for (const auto& a : n.args) args.push_back(scalar_type(a, resolve, allow_aggregates, true));
            auto arity = [&](std::size_t lo, std::size_t hi) {
              if (args.size() < lo || args.size() > hi) {
                throw Error(ErrorCode::TypeMismatch, "wrong number of arguments in " + to_source(s));
              }
            };
            if (n.fn == "count") {
              arity(0, 1);
              return datatype_of(Class::Int);
            }
            if (n.fn == "percentile") {
              arity(2, 2);
              if (!std::holds_alternative<Literal>(n.args[0]->node) || !is_numeric(class_of(args[0]))) {
                throw Error(ErrorCode::TypeMismatch, "percentile needs a numeric literal rank in " + to_source(s));
              }
            } else {
              arity(1, 1);
            }
            const Datatype& x = args.back();
            if (n.fn == "min" || n.fn == "max") return class_of(x) == Class::Text ? x : datatype_of(class_of(x));
            if (!is_numeric(class_of(x))) throw Error(ErrorCode::TypeMismatch, n.fn + " of text in " + to_source(s));
            if (n.fn == "sum") return datatype_of(class_of(x) == Class::Int ? Class::Int : Class::Real);
            return datatype_of(Class::Real);
          },
      },
      s->node);
}

void check_comparable(const Datatype& a, const Datatype& b, const std::string& where) {
  const Class ca = class_of(a);
  const Class cb = class_of(b);
  if (ca == Class::Any || cb == Class::Any) return;
  if (is_numeric(ca) && is_numeric(cb)) return;
  if (ca == Class::Text && cb == Class::Text) return;
  // a year compares with the year part of a date
  if ((a.kind == Datatype::Kind::Year && is_date(b)) || (b.kind == Datatype::Kind::Year && is_date(a))) return;
  throw Error(ErrorCode::TypeMismatch, "cannot compare " + to_string(a) + " with " + to_string(b) + " in " + where);
}

Class literal_class(const Value& v) {
  if (std::holds_alternative<std::int64_t>(v)) return Class::Int;
  if (std::holds_alternative<double>(v)) return Class::Real;
  if (std::holds_alternative<std::string>(v)) return Class::Text;
  return Class::Any;
}

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

// Orders attributes so that primary ones lead, keeping relative order.
void primary_first(Header& h) {
  std::stable_partition(h.attrs.begin(), h.attrs.end(), [](const Attribute& a) { return a.primary; });
}

Resolver resolver_for(const Header& h) {
  return [&h](const std::string& name, bool) -> const Attribute& {
    const Attribute* a = h.find(name);
    if (a == nullptr) throw Error(ErrorCode::UnknownAttribute, "unknown attribute " + name);
    return *a;
  };
}

// Shared by projection and aggregation: the retained and renamed attributes of
// `h` plus computed ones. `compute_type` types computed items.
Header project_header(const Header& h, const std::vector<ProjItem>& items, bool ellipsis,
                      const std::function<Datatype(const ProjItem&)>& compute_type) {
  Header out;
  out.entity_type = h.entity_type;
  out.universal = h.universal;
  std::set<std::string> mentioned;
  std::map<std::string, std::string> primary_renames;  // old -> new
  for (const auto& item : items) {
    mentioned.insert(item.name);
    if (item.kind == ProjItem::Kind::Rename) {
      mentioned.insert(item.source);
      const Attribute* src = h.find(item.source);
      if (src == nullptr) throw Error(ErrorCode::UnknownAttribute, "unknown attribute " + item.source);
      if (src->primary) {
        if (primary_renames.count(item.source)) {
          throw Error(ErrorCode::DuplicateOutputName, "primary attribute " + item.source + " renamed twice");
        }
        primary_renames[item.source] = item.name;
      }
    } else if (item.kind == ProjItem::Kind::Keep) {
      if (!h.has(item.name)) throw Error(ErrorCode::UnknownAttribute, "unknown attribute " + item.name);
    }
  }
  std::set<std::string> used;
  std::set<std::string> used_primary;
  auto emit = [&](Attribute a) {
    if (a.primary) used_primary.insert(a.name);
    if (!used.insert(a.name).second) {
      if (used_primary.count(a.name)) throw Error(ErrorCode::PrimaryRenameCollision, "primary attribute name " + a.name + " collides");
      throw Error(ErrorCode::DuplicateOutputName, "duplicate attribute " + a.name + " in projection");
    }
    out.attrs.push_back(std::move(a));
  };
  for (const auto& a : h.attrs) {
    if (!a.primary) continue;
    Attribute copy = a;
    if (auto it = primary_renames.find(a.name); it != primary_renames.end()) copy.name = it->second;
    emit(std::move(copy));
  }
  for (const auto& item : items) {
    switch (item.kind) {
      case ProjItem::Kind::Keep: {
        const Attribute* a = h.find(item.name);
        if (!a->primary) emit(*a);
        break;
      }
      case ProjItem::Kind::Rename: {
        const Attribute* a = h.find(item.source);
        if (a->primary) break;
        Attribute copy = *a;
        copy.name = item.name;
        emit(std::move(copy));
        break;
      }
      default: {
        Attribute c;
        c.name = item.name;
        c.type = compute_type(item);
        c.lineage = {Lineage{h.entity_type, item.name, next_lineage_serial()}};
        c.nullable = !(item.kind == ProjItem::Kind::AggrCompute &&
                       std::holds_alternative<Call>(item.expr->node) &&
                       std::get<Call>(item.expr->node).fn == "count");
        emit(std::move(c));
        break;
      }
    }
  }
  if (ellipsis) {
    for (const auto& a : h.attrs) {
      if (a.primary || mentioned.count(a.name)) continue;
      emit(a);
    }
  }
  // a kept primary attribute may also be the target name of a rename
  for (const auto& [old_name, new_name] : primary_renames) {
    if (h.has(new_name) && h.find(new_name)->primary && !primary_renames.count(new_name)) {
      throw Error(ErrorCode::PrimaryRenameCollision, "renaming " + old_name + " to existing primary " + new_name);
    }
  }
  primary_first(out);
  return out;
}

}  // namespace

const Header& Analyzer::header(const Query& q) {
  if (auto it = memo_.find(q.get()); it != memo_.end()) return it->second;
  Header h = compute(q);
  return memo_.emplace(q.get(), std::move(h)).first->second;
}

void Analyzer::check_condition(const Condition& c, const Header& h) {
  std::visit(overloaded{
                 [&](const Cmp& n) {
                   if (h.universal) {
                     throw Error(ErrorCode::InvalidUniversalUse, "universal sets can only be restricted by entity sets");
                   }
                   const Resolver r = resolver_for(h);
                   const Datatype lt = scalar_type(n.lhs, r, false, false);
                   if (n.op == CmpOp::In) {
                     for (const auto& v : n.in_values) {
                       const Class lc = literal_class(v);
                       const Class ac = class_of(lt);
                       if (ac == Class::Any || lc == Class::Any) continue;
                       if (is_numeric(ac) != is_numeric(lc)) {
                         throw Error(ErrorCode::TypeMismatch, "in-list value type differs from " + to_source(n.lhs));
                       }
                     }
                     return;
                   }
                   const Datatype rt = scalar_type(n.rhs, r, false, false);
                   check_comparable(lt, rt, to_source(c));
                 },
                 [&](const Mapping&) {
                   if (h.universal) {
                     throw Error(ErrorCode::InvalidUniversalUse, "universal sets can only be restricted by entity sets");
                   }
                 },
                 [&](const OrList& n) {
                   for (const auto& i : n.items) check_condition(i, h);
                 },
                 [&](const AndFn& n) {
                   for (const auto& i : n.items) check_condition(i, h);
                 },
                 [&](const NotFn& n) { check_condition(n.operand, h); },
                 [&](const SubqueryCond& n) {
                   const Header& other = header(n.query);
                   if (auto bad = join_conflicts(h, other); !bad.empty()) {
                     throw Error(ErrorCode::NotJoinable, "non-homologous namesake attributes: " + join_names(bad));
                   }
                 },
             },
             c->node);
}

Header Analyzer::compute(const Query& q) {
  return std::visit(
      overloaded{
          [&](const BaseRef& n) { return catalog_.get(n.name).header(); },
          [&](const Restriction& n) {
            Header h = header(n.operand);
            check_condition(n.cond, h);
            const auto* sub = std::get_if<SubqueryCond>(&n.cond->node);
            if (h.universal && sub && n.polarity == Polarity::Restrict) {
              // restricting a universal set by an entity set materializes it
              const Header& context = header(sub->query);
              if (!context.universal) {
                for (auto& attr : h.attrs) {
                  const Attribute* match = context.find(attr.name);
                  if (match == nullptr) {
                    throw Error(ErrorCode::UnknownAttribute, "universal attribute " + attr.name + " has no counterpart");
                  }
                  attr.type = match->type;
                  attr.lineage = match->lineage;
                  attr.wildcard = false;
                }
                h.universal = false;
              }
            }
            return h;
          },
          [&](const Join& n) {
            const Header& a = header(n.left);
            const Header& b = header(n.right);
            if (auto bad = join_conflicts(a, b); !bad.empty()) {
              throw Error(ErrorCode::NotJoinable, "non-homologous namesake attributes: " + join_names(bad));
            }
            Header out;
            out.universal = a.universal && b.universal;
            out.entity_type = a.universal && !b.universal   ? b.entity_type
                              : b.universal && !a.universal ? a.entity_type
                                                            : "pairing(" + a.entity_type + "," + b.entity_type + ")";
            out.attrs = a.attrs;
            for (const auto& y : b.attrs) {
              auto i = out.index_of(y.name);
              if (!i) {
                out.attrs.push_back(y);
                continue;
              }
              Attribute& x = out.attrs[*i];
              if (x.wildcard && !y.wildcard) {
                const bool primary = x.primary || y.primary;
                x = y;
                x.primary = primary;
              } else {
                x.primary = x.primary || y.primary;
                x.lineage = merge(x.lineage, y.lineage);
              }
              x.nullable = false;
            }
            primary_first(out);
            return out;
          },
          [&](const Projection& n) {
            const Header& h = header(n.operand);
            return project_header(h, n.items, n.ellipsis, [&](const ProjItem& item) {
              return scalar_type(item.expr, resolver_for(h), false, false);
            });
          },
          [&](const Aggregation& n) {
            Header a = header(n.operand);
            const Header& b = header(n.source);
            if (a.universal) {
              for (auto& attr : a.attrs) {
                const Attribute* match = b.find(attr.name);
                if (match == nullptr) {
                  throw Error(ErrorCode::UnknownAttribute, "universal attribute " + attr.name + " has no counterpart");
                }
                attr.type = match->type;
                attr.lineage = match->lineage;
              }
            }
            const Resolver r = [&](const std::string& name, bool in_aggregate) -> const Attribute& {
              const Attribute* x = a.find(name);
              if (!in_aggregate) {
                if (x == nullptr) throw Error(ErrorCode::UnknownAttribute, "unknown attribute " + name);
                return *x;
              }
              const Attribute* y = b.find(name);
              if (x && y && !homologous(*x, *y)) {
                throw Error(ErrorCode::AmbiguousAttribute, name + " names different attributes in both operands");
              }
              if (y) return *y;
              if (x) return *x;
              throw Error(ErrorCode::UnknownAttribute, "unknown attribute " + name);
            };
            Header out = project_header(a, n.items, n.ellipsis, [&](const ProjItem& item) {
              return scalar_type(item.expr, r, item.kind == ProjItem::Kind::AggrCompute, false);
            });
            out.universal = false;
            for (auto& attr : out.attrs) attr.wildcard = false;
            return out;
          },
          [&](const UnionOf& n) {
            const Header& a = header(n.left);
            const Header& b = header(n.right);
            auto names_a = a.names();
            auto names_b = b.names();
            std::sort(names_a.begin(), names_a.end());
            std::sort(names_b.begin(), names_b.end());
            if (names_a != names_b) {
              throw Error(ErrorCode::UnionIncompatible, "operands have different attributes");
            }
            Header out = a;
            for (auto& x : out.attrs) {
              const Attribute* y = b.find(x.name);
              if (x.primary != y->primary) throw Error(ErrorCode::UnionIncompatible, "primary keys differ at " + x.name);
              if (!(x.type == y->type) && !x.wildcard && !y->wildcard) {
                throw Error(ErrorCode::UnionIncompatible, "datatypes of " + x.name + " differ");
              }
              if (x.primary && !homologous(x, *y)) {
                throw Error(ErrorCode::UnionIncompatible, "primary attribute " + x.name + " is not homologous");
              }
              x.lineage = merge(x.lineage, y->lineage);
              x.nullable = x.nullable || y->nullable;
              x.wildcard = x.wildcard && y->wildcard;
            }
            out.universal = a.universal && b.universal;
            return out;
          },
          [&](const Universal& n) {
            Header out;
            out.universal = true;
            out.entity_type = "universal(" + join_names(n.attrs) + ")";
            for (const auto& name : n.attrs) {
              if (out.has(name)) throw Error(ErrorCode::DuplicateOutputName, "duplicate attribute " + name);
              out.attrs.push_back(Attribute{name, Datatype::of(Datatype::Kind::Any), {}, true, false, true});
            }
            return out;
          },
      },
      q->node);
}

Header analyze(const Query& q, const Catalog& catalog) { return Analyzer(catalog).header(q); }

}  // namespace dj
