#include "dj/ast.hpp"

#include <algorithm>

#include "dj/lexer.hpp"

namespace dj::ast {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Query make_query(decltype(QueryNode::node) node) { return std::make_shared<const QueryNode>(QueryNode{std::move(node), {}}); }
Condition make_cond(decltype(ConditionNode::node) node) {
  return std::make_shared<const ConditionNode>(ConditionNode{std::move(node), {}});
}
Scalar make_scalar(decltype(ScalarNode::node) node) {
  return std::make_shared<const ScalarNode>(ScalarNode{std::move(node), {}});
}

bool equal_values(const std::vector<Value>& a, const std::vector<Value>& b) { return a == b; }

bool equal_items(const std::vector<ProjItem>& a, const std::vector<ProjItem>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].kind != b[i].kind || a[i].name != b[i].name || a[i].source != b[i].source) return false;
    if ((a[i].expr == nullptr) != (b[i].expr == nullptr)) return false;
    if (a[i].expr && !equal(a[i].expr, b[i].expr)) return false;
  }
  return true;
}

bool equal_conds(const std::vector<Condition>& a, const std::vector<Condition>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!equal(a[i], b[i])) return false;
  }
  return true;
}

void collect_bases(const Query& q, std::vector<std::string>& out);

void collect_bases(const Condition& c, std::vector<std::string>& out) {
  std::visit(overloaded{
                 [&](const OrList& n) {
                   for (const auto& i : n.items) collect_bases(i, out);
                 },
                 [&](const AndFn& n) {
                   for (const auto& i : n.items) collect_bases(i, out);
                 },
                 [&](const NotFn& n) { collect_bases(n.operand, out); },
                 [&](const SubqueryCond& n) { collect_bases(n.query, out); },
                 [](const auto&) {},
             },
             c->node);
}

void collect_bases(const Query& q, std::vector<std::string>& out) {
  std::visit(overloaded{
                 [&](const BaseRef& n) {
                   if (std::find(out.begin(), out.end(), n.name) == out.end()) out.push_back(n.name);
                 },
                 [&](const Restriction& n) {
                   collect_bases(n.operand, out);
                   collect_bases(n.cond, out);
                 },
                 [&](const Join& n) {
                   collect_bases(n.left, out);
                   collect_bases(n.right, out);
                 },
                 [&](const Projection& n) { collect_bases(n.operand, out); },
                 [&](const Aggregation& n) {
                   collect_bases(n.operand, out);
                   collect_bases(n.source, out);
                 },
                 [&](const UnionOf& n) {
                   collect_bases(n.left, out);
                   collect_bases(n.right, out);
                 },
                 [](const Universal&) {},
             },
             q->node);
}

using Lookup = std::function<Query(const std::string&)>;

Condition substitute_cond(const Condition& c, const Lookup& lookup) {
  auto rebuilt = std::visit(
      overloaded{
          [&](const OrList& n) -> Condition {
            std::vector<Condition> items;
            for (const auto& i : n.items) items.push_back(substitute_cond(i, lookup));
            return any_of(std::move(items));
          },
          [&](const AndFn& n) -> Condition {
            std::vector<Condition> items;
            for (const auto& i : n.items) items.push_back(substitute_cond(i, lookup));
            return all_of(std::move(items));
          },
          [&](const NotFn& n) -> Condition { return negate(substitute_cond(n.operand, lookup)); },
          [&](const SubqueryCond& n) -> Condition { return subquery(substitute(n.query, lookup)); },
          [&](const auto&) -> Condition { return c; },
      },
      c->node);
  if (rebuilt == c) return c;
  auto node = *rebuilt;
  node.pos = c->pos;
  return std::make_shared<const ConditionNode>(std::move(node));
}

Condition strip_cond(const Condition& c);

}  // namespace

Scalar attr(std::string name) { return make_scalar(AttrRef{std::move(name)}); }
Scalar lit(Value v) { return make_scalar(Literal{std::move(v)}); }
Scalar arith(ArithOp op, Scalar a, Scalar b) { return make_scalar(Arith{op, std::move(a), std::move(b)}); }
Scalar call(std::string fn, std::vector<Scalar> args) { return make_scalar(Call{std::move(fn), std::move(args)}); }

Condition cmp(CmpOp op, Scalar lhs, Scalar rhs) { return make_cond(Cmp{op, std::move(lhs), std::move(rhs), {}}); }
Condition in_list(Scalar lhs, std::vector<Value> values) {
  return make_cond(Cmp{CmpOp::In, std::move(lhs), nullptr, std::move(values)});
}
Condition mapping(std::vector<std::pair<std::string, Value>> entries) { return make_cond(Mapping{std::move(entries)}); }
Condition any_of(std::vector<Condition> items) { return make_cond(OrList{std::move(items)}); }
Condition all_of(std::vector<Condition> items) { return make_cond(AndFn{std::move(items)}); }
Condition negate(Condition c) { return make_cond(NotFn{std::move(c)}); }
Condition subquery(Query q) { return make_cond(SubqueryCond{std::move(q)}); }

Query base(std::string name) { return make_query(BaseRef{std::move(name)}); }
Query restrict(Query operand, Condition cond) {
  return make_query(Restriction{std::move(operand), std::move(cond), Polarity::Restrict});
}
Query exclude(Query operand, Condition cond) {
  return make_query(Restriction{std::move(operand), std::move(cond), Polarity::Exclude});
}
Query join(Query a, Query b) { return make_query(Join{std::move(a), std::move(b)}); }
Query project(Query operand, std::vector<ProjItem> items, bool ellipsis) {
  return make_query(Projection{std::move(operand), std::move(items), ellipsis});
}
Query aggregate(Query operand, Query source, std::vector<ProjItem> items, bool ellipsis) {
  return make_query(Aggregation{std::move(operand), std::move(source), std::move(items), ellipsis});
}
Query unite(Query a, Query b) { return make_query(UnionOf{std::move(a), std::move(b)}); }
Query universal(std::vector<std::string> attrs) { return make_query(Universal{std::move(attrs)}); }

ProjItem keep(std::string name) { return ProjItem{ProjItem::Kind::Keep, std::move(name), {}, nullptr}; }
ProjItem rename(std::string name, std::string source) {
  return ProjItem{ProjItem::Kind::Rename, std::move(name), std::move(source), nullptr};
}
ProjItem compute(std::string name, Scalar expr) {
  const auto kind = contains_aggregate(expr) ? ProjItem::Kind::AggrCompute : ProjItem::Kind::Compute;
  return ProjItem{kind, std::move(name), {}, std::move(expr)};
}

bool contains_aggregate(const Scalar& s) {
  return std::visit(overloaded{
                        [](const Call& n) { return is_aggregate_function(n.fn); },
                        [](const Arith& n) { return contains_aggregate(n.lhs) || contains_aggregate(n.rhs); },
                        [](const Negate& n) { return contains_aggregate(n.operand); },
                        [](const auto&) { return false; },
                    },
                    s->node);
}

bool equal(const Scalar& a, const Scalar& b) {
  if (a->node.index() != b->node.index()) return false;
  return std::visit(overloaded{
                        [&](const AttrRef& x) { return x.name == std::get<AttrRef>(b->node).name; },
                        [&](const Literal& x) { return x.value == std::get<Literal>(b->node).value; },
                        [&](const Arith& x) {
                          const auto& y = std::get<Arith>(b->node);
                          return x.op == y.op && equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
                        },
                        [&](const Negate& x) { return equal(x.operand, std::get<Negate>(b->node).operand); },
                        [&](const Call& x) {
                          const auto& y = std::get<Call>(b->node);
                          if (x.fn != y.fn || x.args.size() != y.args.size()) return false;
                          for (std::size_t i = 0; i < x.args.size(); ++i) {
                            if (!equal(x.args[i], y.args[i])) return false;
                          }
                          return true;
                        },
                    },
                    a->node);
}

bool equal(const Condition& a, const Condition& b) {
  if (a->node.index() != b->node.index()) return false;
  return std::visit(overloaded{
                        [&](const Cmp& x) {
                          const auto& y = std::get<Cmp>(b->node);
                          if (x.op != y.op || !equal(x.lhs, y.lhs)) return false;
                          if (x.op == CmpOp::In) return equal_values(x.in_values, y.in_values);
                          return equal(x.rhs, y.rhs);
                        },
                        [&](const Mapping& x) { return x.entries == std::get<Mapping>(b->node).entries; },
                        [&](const OrList& x) { return equal_conds(x.items, std::get<OrList>(b->node).items); },
                        [&](const AndFn& x) { return equal_conds(x.items, std::get<AndFn>(b->node).items); },
                        [&](const NotFn& x) { return equal(x.operand, std::get<NotFn>(b->node).operand); },
                        [&](const SubqueryCond& x) { return equal(x.query, std::get<SubqueryCond>(b->node).query); },
                    },
                    a->node);
}

bool equal(const Query& a, const Query& b) {
  if (a->node.index() != b->node.index()) return false;
  return std::visit(overloaded{
                        [&](const BaseRef& x) { return x.name == std::get<BaseRef>(b->node).name; },
                        [&](const Restriction& x) {
                          const auto& y = std::get<Restriction>(b->node);
                          return x.polarity == y.polarity && equal(x.operand, y.operand) && equal(x.cond, y.cond);
                        },
                        [&](const Join& x) {
                          const auto& y = std::get<Join>(b->node);
                          return equal(x.left, y.left) && equal(x.right, y.right);
                        },
                        [&](const Projection& x) {
                          const auto& y = std::get<Projection>(b->node);
                          return x.ellipsis == y.ellipsis && equal(x.operand, y.operand) && equal_items(x.items, y.items);
                        },
                        [&](const Aggregation& x) {
                          const auto& y = std::get<Aggregation>(b->node);
                          return x.ellipsis == y.ellipsis && equal(x.operand, y.operand) && equal(x.source, y.source) &&
                                 equal_items(x.items, y.items);
                        },
                        [&](const UnionOf& x) {
                          const auto& y = std::get<UnionOf>(b->node);
                          return equal(x.left, y.left) && equal(x.right, y.right);
                        },
                        [&](const Universal& x) { return x.attrs == std::get<Universal>(b->node).attrs; },
                    },
                    a->node);
}

std::vector<std::string> base_names(const Query& q) {
  std::vector<std::string> out;
  collect_bases(q, out);
  return out;
}

Query substitute(const Query& q, const Lookup& lookup) {
  auto rebuilt = std::visit(
      overloaded{
          [&](const BaseRef& n) -> Query {
            if (auto bound = lookup(n.name)) return bound;
            return q;
          },
          [&](const Restriction& n) -> Query {
            return make_query(Restriction{substitute(n.operand, lookup), substitute_cond(n.cond, lookup), n.polarity});
          },
          [&](const Join& n) -> Query { return join(substitute(n.left, lookup), substitute(n.right, lookup)); },
          [&](const Projection& n) -> Query { return project(substitute(n.operand, lookup), n.items, n.ellipsis); },
          [&](const Aggregation& n) -> Query {
            return aggregate(substitute(n.operand, lookup), substitute(n.source, lookup), n.items, n.ellipsis);
          },
          [&](const UnionOf& n) -> Query { return unite(substitute(n.left, lookup), substitute(n.right, lookup)); },
          [&](const Universal&) -> Query { return q; },
      },
      q->node);
  if (rebuilt == q || std::holds_alternative<BaseRef>(q->node)) return rebuilt;
  auto node = *rebuilt;
  node.pos = q->pos;
  return std::make_shared<const QueryNode>(std::move(node));
}

namespace {

Condition strip_cond(const Condition& c) {
  return std::visit(overloaded{
                        [&](const OrList& n) -> Condition {
                          std::vector<Condition> items;
                          for (const auto& i : n.items) items.push_back(strip_cond(i));
                          return any_of(std::move(items));
                        },
                        [&](const AndFn& n) -> Condition {
                          std::vector<Condition> items;
                          for (const auto& i : n.items) items.push_back(strip_cond(i));
                          return all_of(std::move(items));
                        },
                        [&](const NotFn& n) -> Condition { return negate(strip_cond(n.operand)); },
                        [&](const SubqueryCond& n) -> Condition { return subquery(strip_restrictions(n.query)); },
                        [&](const auto&) -> Condition { return c; },
                    },
                    c->node);
}

}  // namespace

Query strip_restrictions(const Query& q) {
  return std::visit(
      overloaded{
          [&](const BaseRef&) -> Query { return q; },
          [&](const Restriction& n) -> Query { return strip_restrictions(n.operand); },
          [&](const Join& n) -> Query { return join(strip_restrictions(n.left), strip_restrictions(n.right)); },
          [&](const Projection& n) -> Query { return project(strip_restrictions(n.operand), n.items, n.ellipsis); },
          [&](const Aggregation& n) -> Query {
            return aggregate(strip_restrictions(n.operand), strip_restrictions(n.source), n.items, n.ellipsis);
          },
          [&](const UnionOf& n) -> Query { return unite(strip_restrictions(n.left), strip_restrictions(n.right)); },
          [&](const Universal&) -> Query { return q; },
      },
      q->node);
}

}  // namespace dj::ast
