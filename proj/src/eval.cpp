#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>
#include <unordered_set>

#include "dj/algebra.hpp"
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

using Pred = std::function<bool(const Row&)>;
using Fn = std::function<Value(const Row&)>;
using IndexOf = std::function<std::size_t(const std::string&)>;

bool looks_like_date(const std::string& s) {
  return s.size() >= 10 && s[4] == '-' && s[7] == '-' && std::isdigit(static_cast<unsigned char>(s[0]));
}

// Condition comparison. A year (integer) against a date compares years.
std::partial_ordering compare_condition(const Value& a, const Value& b) {
  if (is_null(a) || is_null(b)) return std::partial_ordering::unordered;
  if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::string>(b)) {
    const auto& s = std::get<std::string>(b);
    if (looks_like_date(s)) return std::get<std::int64_t>(a) <=> std::int64_t{std::stoll(s.substr(0, 4))};
  }
  if (std::holds_alternative<std::string>(a) && std::holds_alternative<std::int64_t>(b)) {
    const auto& s = std::get<std::string>(a);
    if (looks_like_date(s)) return std::int64_t{std::stoll(s.substr(0, 4))} <=> std::get<std::int64_t>(b);
  }
  return compare_values(a, b);
}

Value arithmetic(ArithOp op, const Value& a, const Value& b) {
  if (is_null(a) || is_null(b)) return Null{};
  if (std::holds_alternative<std::string>(a) || std::holds_alternative<std::string>(b)) {
    if (op == ArithOp::Add && std::holds_alternative<std::string>(a) && std::holds_alternative<std::string>(b)) {
      return std::get<std::string>(a) + std::get<std::string>(b);
    }
    throw Error(ErrorCode::TypeMismatch, "arithmetic on text");
  }
  if (op != ArithOp::Div && std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b)) {
    const std::int64_t x = std::get<std::int64_t>(a);
    const std::int64_t y = std::get<std::int64_t>(b);
    std::int64_t r = 0;
    bool overflow = false;
    switch (op) {
      case ArithOp::Add: overflow = __builtin_add_overflow(x, y, &r); break;
      case ArithOp::Sub: overflow = __builtin_sub_overflow(x, y, &r); break;
      default: overflow = __builtin_mul_overflow(x, y, &r); break;
    }
    if (!overflow) return r;
  }
  const double x = as_double(a);
  const double y = as_double(b);
  switch (op) {
    case ArithOp::Add: return x + y;
    case ArithOp::Sub: return x - y;
    case ArithOp::Mul: return x * y;
    case ArithOp::Div:
      if (y == 0) return Null{};
      return x / y;
  }
  return Null{};
}

Value negate_value(const Value& v) {
  if (std::holds_alternative<std::int64_t>(v)) return -std::get<std::int64_t>(v);
  if (std::holds_alternative<double>(v)) return -std::get<double>(v);
  return Null{};
}

double percentile_of(std::vector<double> xs, double p) {
  std::sort(xs.begin(), xs.end());
  p = std::clamp(p, 0.0, 100.0);
  const double rank = p / 100.0 * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = static_cast<std::size_t>(std::ceil(rank));
  return xs[lo] + (xs[hi] - xs[lo]) * (rank - static_cast<double>(lo));
}

// Aggregation over the non-null values of one group.
Value aggregate_values(const std::string& fn, const std::vector<Value>& values, double p, std::size_t group_size) {
  if (fn == "count") return static_cast<std::int64_t>(group_size);
  if (values.empty()) return Null{};
  if (fn == "min" || fn == "max") {
    Value best = values.front();
    for (const auto& v : values) {
      const auto c = compare_values(v, best);
      if ((fn == "min" && c < 0) || (fn == "max" && c > 0)) best = v;
    }
    return best;
  }
  if (fn == "sum") {
    bool all_int = std::all_of(values.begin(), values.end(),
                               [](const Value& v) { return std::holds_alternative<std::int64_t>(v); });
    if (all_int) {
      std::int64_t s = 0;
      bool overflow = false;
      for (const auto& v : values) overflow = overflow || __builtin_add_overflow(s, std::get<std::int64_t>(v), &s);
      if (!overflow) return s;
    }
    double s = 0;
    for (const auto& v : values) s += as_double(v);
    return s;
  }
  std::vector<double> xs;
  xs.reserve(values.size());
  for (const auto& v : values) xs.push_back(as_double(v));
  const double n = static_cast<double>(xs.size());
  if (fn == "avg") {
    double s = 0;
    for (double x : xs) s += x;
    return s / n;
  }
  if (fn == "median") return percentile_of(std::move(xs), 50.0);
  if (fn == "percentile") return percentile_of(std::move(xs), p);
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= n;
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = ss / n;
  if (fn == "var") return var;
  return std::sqrt(var);
}

IndexOf index_in(const Header& h) {
  return [&h](const std::string& name) {
    auto i = h.index_of(name);
    if (!i) throw Error(ErrorCode::UnknownAttribute, "unknown attribute " + name);
    return *i;
  };
}

Fn compile_scalar(const Scalar& s, const IndexOf& index) {
  return std::visit(overloaded{
                        [&](const AttrRef& n) -> Fn {
                          const std::size_t i = index(n.name);
                          return [i](const Row& r) { return r[i]; };
                        },
                        [&](const Literal& n) -> Fn {
                          Value v = n.value;
                          return [v](const Row&) { return v; };
                        },
                        [&](const Arith& n) -> Fn {
                          Fn a = compile_scalar(n.lhs, index);
                          Fn b = compile_scalar(n.rhs, index);
                          const ArithOp op = n.op;
                          return [a, b, op](const Row& r) { return arithmetic(op, a(r), b(r)); };
                        },
                        [&](const Negate& n) -> Fn {
                          Fn a = compile_scalar(n.operand, index);
                          return [a](const Row& r) { return negate_value(a(r)); };
                        },
                        [&](const Call& n) -> Fn {
                          throw Error(ErrorCode::AggrFnOutsideAggregate, n.fn + "() outside aggr");
                        },
                    },
                    s->node);
}

// Matching of two relations on their homologous namesake attributes.
struct Matching {
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;

  Matching(const Header& a, const Header& b) {
    for (std::size_t i = 0; i < a.attrs.size(); ++i) {
      auto j = b.index_of(a.attrs[i].name);
      if (j && homologous(a.attrs[i], b.attrs[*j])) {
        left.push_back(i);
        right.push_back(*j);
      }
    }
  }

  static std::optional<Row> key(const Row& r, const std::vector<std::size_t>& idx) {
    Row k;
    k.reserve(idx.size());
    for (std::size_t i : idx) {
      if (is_null(r[i])) return std::nullopt;
      k.push_back(r[i]);
    }
    return k;
  }
};

using KeySet = std::unordered_set<Row, RowHash>;
using KeyGroups = std::unordered_map<Row, std::vector<const Row*>, RowHash>;

class Evaluator {
 public:
  explicit Evaluator(const RelationSource& source) : source_(source), analyzer_(source.catalog()) {}

  Relation run(const Query& q, const Relation* context = nullptr) {
    Relation out = std::visit(overloaded{
                                  [&](const BaseRef& n) { return source_.base(n.name); },
                                  [&](const Universal& n) { return universal(n, context); },
                                  [&](const Restriction& n) { return restriction(q, n, context); },
                                  [&](const Join& n) { return join_rel(q, n, context); },
                                  [&](const Projection& n) { return projection(q, n, context); },
                                  [&](const Aggregation& n) { return aggregation(q, n); },
                                  [&](const UnionOf& n) { return union_rel(q, n, context); },
                              },
                              q->node);
    out.canonicalize();
    return out;
  }

  Relation filter(const Relation& rel, const Condition& cond, Polarity polarity) {
    Pred p = compile(cond, rel);
    Relation out;
    out.header = rel.header;
    const bool keep = polarity == Polarity::Restrict;
    for (const auto& r : rel.rows) {
      if (p(r) == keep) out.rows.push_back(r);
    }
    return out;
  }

  Analyzer& analyzer() { return analyzer_; }

 private:
  bool needs_context(const Query& q) {
    const Header& h = analyzer_.header(q);
    return h.universal && !h.attrs.empty();
  }

  Relation universal(const Universal& n, const Relation* context) {
    Relation out;
    out.header.universal = true;
    for (const auto& name : n.attrs) out.header.attrs.push_back(Attribute{name, Datatype::of(Datatype::Kind::Any), {}, true, false, true});
    if (n.attrs.empty()) {
      out.rows.push_back({});
      return out;
    }
    if (context == nullptr) {
      throw Error(ErrorCode::UniversalNotMaterializable,
                  "U(...) with attributes must be restricted by, joined with, or aggregated over an entity set");
    }
    std::vector<std::size_t> idx;
    for (auto& attr : out.header.attrs) {
      auto i = context->header.index_of(attr.name);
      if (!i) throw Error(ErrorCode::UnknownAttribute, "universal attribute " + attr.name + " has no counterpart");
      idx.push_back(*i);
      const Attribute& src = context->header.attrs[*i];
      attr.type = src.type;
      attr.lineage = src.lineage;
      attr.wildcard = false;
    }
    out.header.universal = false;
    for (const auto& r : context->rows) {
      if (auto k = Matching::key(r, idx)) out.rows.push_back(std::move(*k));
    }
    return out;
  }

  Relation restriction(const Query& q, const Restriction& n, const Relation* context) {
    Relation operand;
    const auto* sub = std::get_if<SubqueryCond>(&n.cond->node);
    if (needs_context(n.operand) && sub && n.polarity == Polarity::Restrict && !needs_context(sub->query)) {
      Relation ctx = run(sub->query);
      operand = run(n.operand, &ctx);
    } else {
      operand = run(n.operand, context);
    }
    Relation out = filter(operand, n.cond, n.polarity);
    out.header = merge_header(analyzer_.header(q), out.header);
    return out;
  }

  // The analyzer header describes the node; when the operand was a
  // materialized universal set the concrete types come from the rows' header.
  static Header merge_header(const Header& analyzed, const Header& concrete) {
    if (!analyzed.universal || analyzed.attrs.size() != concrete.attrs.size()) return analyzed;
    return concrete;
  }

  Relation join_rel(const Query& q, const Join& n, const Relation* context) {
    Relation a;
    Relation b;
    const bool ua = needs_context(n.left);
    const bool ub = needs_context(n.right);
    if (ua && ub) {
      if (context == nullptr) throw Error(ErrorCode::UniversalNotMaterializable, "join of two universal sets");
      a = run(n.left, context);
      b = run(n.right, context);
    } else if (ua) {
      b = run(n.right, context);
      a = run(n.left, &b);
    } else if (ub) {
      a = run(n.left, context);
      b = run(n.right, &a);
    } else {
      a = run(n.left, context);
      b = run(n.right, context);
    }
    Relation out;
    out.header = analyzer_.header(q);
    if (out.header.universal) out.header = join_header_of(a.header, b.header);
    Matching m(a.header, b.header);
    // each output attribute comes from the left row when present there
    std::vector<std::pair<bool, std::size_t>> from;
    for (const auto& attr : out.header.attrs) {
      if (auto i = a.header.index_of(attr.name)) {
        from.emplace_back(true, *i);
      } else {
        from.emplace_back(false, *b.header.index_of(attr.name));
      }
    }
    KeyGroups groups;
    for (const auto& r : b.rows) {
      if (auto k = Matching::key(r, m.right)) groups[*k].push_back(&r);
    }
    for (const auto& ra : a.rows) {
      auto k = Matching::key(ra, m.left);
      if (!k) continue;
      auto it = groups.find(*k);
      if (it == groups.end()) continue;
      for (const Row* rb : it->second) {
        Row merged;
        merged.reserve(from.size());
        for (const auto& [left, i] : from) merged.push_back(left ? ra[i] : (*rb)[i]);
        out.rows.push_back(std::move(merged));
      }
    }
    return out;
  }

  static Header join_header_of(const Header& a, const Header& b) {
    Header out = a;
    out.universal = false;
    for (const auto& y : b.attrs) {
      if (auto i = out.index_of(y.name)) {
        out.attrs[*i].primary = out.attrs[*i].primary || y.primary;
      } else {
        out.attrs.push_back(y);
      }
    }
    std::stable_partition(out.attrs.begin(), out.attrs.end(), [](const Attribute& x) { return x.primary; });
    return out;
  }

  // Output attribute sources for projection-like nodes.
  struct Source {
    enum Kind { Copy, Scalar, Aggregate } kind = Copy;
    std::size_t index = 0;
    Fn fn;
    const ProjItem* item = nullptr;
  };

  std::vector<Source> sources(const Header& out, const Header& in, const std::vector<ProjItem>& items) {
    std::vector<Source> result;
    for (const auto& attr : out.attrs) {
      const ProjItem* found = nullptr;
      for (const auto& item : items) {
        if (item.name == attr.name && item.kind != ProjItem::Kind::Keep) found = &item;
      }
      Source s;
      if (found && found->kind == ProjItem::Kind::Rename) {
        s.index = *in.index_of(found->source);
      } else if (found && found->kind == ProjItem::Kind::Compute) {
        s.kind = Source::Scalar;
        s.fn = compile_scalar(found->expr, index_in(in));
      } else if (found) {
        s.kind = Source::Aggregate;
        s.item = found;
      } else {
        s.index = *in.index_of(attr.name);
      }
      result.push_back(std::move(s));
    }
    return result;
  }

  Relation projection(const Query& q, const Projection& n, const Relation* context) {
    Relation in = run(n.operand, context);
    Relation out;
    out.header = analyzer_.header(q);
    if (out.header.universal) {
      // projected universal set materialized from context: take concrete types
      for (auto& attr : out.header.attrs) {
        if (const Attribute* c = in.header.find(attr.name); c && attr.wildcard) attr = *c;
      }
      out.header.universal = in.header.universal;
    }
    auto srcs = sources(out.header, in.header, n.items);
    for (const auto& r : in.rows) {
      Row row;
      row.reserve(srcs.size());
      for (const auto& s : srcs) row.push_back(s.kind == Source::Copy ? r[s.index] : s.fn(r));
      out.rows.push_back(std::move(row));
    }
    return out;
  }

  // Compiles an aggregate-definition expression. Names inside aggregation
  // calls read the combined row (group row of B followed by the row of A);
  // names outside read A.
  using AggFn = std::function<Value(const Row& a, const std::vector<const Row*>& group)>;

  AggFn compile_aggregate(const Scalar& s, const Header& a, const Header& b) {
    return std::visit(
        overloaded{
            [&](const AttrRef& n) -> AggFn {
              const std::size_t i = index_in(a)(n.name);
              return [i](const Row& r, const std::vector<const Row*>&) { return r[i]; };
            },
            [&](const Literal& n) -> AggFn {
              Value v = n.value;
              return [v](const Row&, const std::vector<const Row*>&) { return v; };
            },
            [&](const Arith& n) -> AggFn {
              AggFn x = compile_aggregate(n.lhs, a, b);
              AggFn y = compile_aggregate(n.rhs, a, b);
              const ArithOp op = n.op;
              return [x, y, op](const Row& r, const std::vector<const Row*>& g) { return arithmetic(op, x(r, g), y(r, g)); };
            },
            [&](const Negate& n) -> AggFn {
              AggFn x = compile_aggregate(n.operand, a, b);
              return [x](const Row& r, const std::vector<const Row*>& g) { return negate_value(x(r, g)); };
            },
            [&](const Call& n) -> AggFn {
              const std::size_t width = b.attrs.size();
              IndexOf combined = [&a, &b, width](const std::string& name) -> std::size_t {
                if (auto j = b.index_of(name)) return *j;
                if (auto i = a.index_of(name)) return width + *i;
                throw Error(ErrorCode::UnknownAttribute, "unknown attribute " + name);
              };
              std::optional<Fn> arg;
              double p = 0;
              if (!n.args.empty()) arg = compile_scalar(n.args.back(), combined);
              if (n.fn == "percentile") p = as_double(std::get<Literal>(n.args.front()->node).value);
              const std::string fn = n.fn;
              const bool count_rows = fn == "count" && !arg;
              return [arg, p, fn, count_rows](const Row& r, const std::vector<const Row*>& g) -> Value {
                if (count_rows) return static_cast<std::int64_t>(g.size());
                std::vector<Value> values;
                Row combined_row;
                for (const Row* gr : g) {
                  combined_row = *gr;
                  combined_row.insert(combined_row.end(), r.begin(), r.end());
                  Value v = (*arg)(combined_row);
                  if (!is_null(v)) values.push_back(std::move(v));
                }
                if (fn == "count") return static_cast<std::int64_t>(values.size());
                return aggregate_values(fn, values, p, g.size());
              };
            },
        },
        s->node);
  }

  Relation aggregation(const Query& q, const Aggregation& n) {
    Relation b = run(n.source);
    const bool universal_a = analyzer_.header(n.operand).universal;
    Relation a = run(n.operand, universal_a ? &b : nullptr);
    Relation out;
    out.header = analyzer_.header(q);
    Matching m(a.header, b.header);
    KeyGroups groups;
    for (const auto& r : b.rows) {
      if (auto k = Matching::key(r, m.right)) groups[*k].push_back(&r);
    }
    auto srcs = sources(out.header, a.header, n.items);
    std::vector<AggFn> aggs(srcs.size());
    for (std::size_t i = 0; i < srcs.size(); ++i) {
      if (srcs[i].kind == Source::Aggregate) aggs[i] = compile_aggregate(srcs[i].item->expr, a.header, b.header);
    }
    const std::vector<const Row*> empty;
    for (const auto& ra : a.rows) {
      const std::vector<const Row*>* group = &empty;
      if (auto k = Matching::key(ra, m.left)) {
        if (auto it = groups.find(*k); it != groups.end()) group = &it->second;
      }
      if (universal_a && group->empty()) continue;
      Row row;
      row.reserve(srcs.size());
      for (std::size_t i = 0; i < srcs.size(); ++i) {
        switch (srcs[i].kind) {
          case Source::Copy: row.push_back(ra[srcs[i].index]); break;
          case Source::Scalar: row.push_back(srcs[i].fn(ra)); break;
          case Source::Aggregate: row.push_back(aggs[i](ra, *group)); break;
        }
      }
      out.rows.push_back(std::move(row));
    }
    return out;
  }

  Relation union_rel(const Query& q, const UnionOf& n, const Relation* context) {
    Relation a = run(n.left, context);
    Relation b = run(n.right, context);
    Relation out;
    out.header = analyzer_.header(q);
    if (out.header.universal) out.header = a.header;
    std::vector<std::size_t> order;
    for (const auto& attr : out.header.attrs) order.push_back(*b.header.index_of(attr.name));
    std::vector<std::size_t> a_order;
    for (const auto& attr : out.header.attrs) a_order.push_back(*a.header.index_of(attr.name));
    auto reorder = [](const Row& r, const std::vector<std::size_t>& idx) {
      Row o;
      o.reserve(idx.size());
      for (std::size_t i : idx) o.push_back(r[i]);
      return o;
    };
    const std::size_t pk = out.header.primary_count();
    const bool has_secondary = pk < out.header.attrs.size();
    std::unordered_map<Row, Row, RowHash> by_key;
    for (const auto& r : a.rows) {
      Row o = reorder(r, a_order);
      if (has_secondary) by_key.emplace(Row(o.begin(), o.begin() + static_cast<std::ptrdiff_t>(pk)), o);
      out.rows.push_back(std::move(o));
    }
    for (const auto& r : b.rows) {
      Row o = reorder(r, order);
      if (has_secondary) {
        auto it = by_key.find(Row(o.begin(), o.begin() + static_cast<std::ptrdiff_t>(pk)));
        if (it != by_key.end() && it->second != o) {
          throw Error(ErrorCode::UnionOverlap, "union operands share a primary key with different secondary values");
        }
      }
      out.rows.push_back(std::move(o));
    }
    return out;
  }

  Pred compile(const Condition& c, const Relation& rel) {
    const Header& h = rel.header;
    return std::visit(
        overloaded{
            [&](const Cmp& n) -> Pred {
              Fn lhs = compile_scalar(n.lhs, index_in(h));
              if (n.op == CmpOp::In) {
                std::vector<Value> values = n.in_values;
                return [lhs, values](const Row& r) {
                  const Value v = lhs(r);
                  return std::any_of(values.begin(), values.end(),
                                     [&](const Value& x) { return compare_condition(v, x) == 0; });
                };
              }
              Fn rhs = compile_scalar(n.rhs, index_in(h));
              const CmpOp op = n.op;
              return [lhs, rhs, op](const Row& r) {
                const auto c = compare_condition(lhs(r), rhs(r));
                if (c == std::partial_ordering::unordered) return false;
                switch (op) {
                  case CmpOp::Eq: return c == 0;
                  case CmpOp::Ne: return c != 0;
                  case CmpOp::Lt: return c < 0;
                  case CmpOp::Le: return c <= 0;
                  case CmpOp::Gt: return c > 0;
                  case CmpOp::Ge: return c >= 0;
                  default: return false;
                }
              };
            },
            [&](const Mapping& n) -> Pred {
              std::vector<std::pair<std::size_t, Value>> tests;
              for (const auto& [key, value] : n.entries) {
                if (auto i = h.index_of(key)) tests.emplace_back(*i, value);
              }
              return [tests](const Row& r) {
                for (const auto& [i, v] : tests) {
                  if (is_null(v) != is_null(r[i])) return false;
                  if (!is_null(v) && compare_condition(r[i], v) != 0) return false;
                }
                return true;
              };
            },
            [&](const OrList& n) -> Pred {
              std::vector<Pred> ps;
              for (const auto& i : n.items) ps.push_back(compile(i, rel));
              return [ps](const Row& r) { return std::any_of(ps.begin(), ps.end(), [&](const Pred& p) { return p(r); }); };
            },
            [&](const AndFn& n) -> Pred {
              std::vector<Pred> ps;
              for (const auto& i : n.items) ps.push_back(compile(i, rel));
              return [ps](const Row& r) { return std::all_of(ps.begin(), ps.end(), [&](const Pred& p) { return p(r); }); };
            },
            [&](const NotFn& n) -> Pred {
              Pred p = compile(n.operand, rel);
              return [p](const Row& r) { return !p(r); };
            },
            [&](const SubqueryCond& n) -> Pred {
              Relation other = run(n.query, needs_context(n.query) ? &rel : nullptr);
              Matching m(h, other.header);
              if (m.left.empty()) {
                const bool any = !other.empty();
                return [any](const Row&) { return any; };
              }
              auto keys = std::make_shared<KeySet>();
              for (const auto& r : other.rows) {
                if (auto k = Matching::key(r, m.right)) keys->insert(std::move(*k));
              }
              std::vector<std::size_t> left = m.left;
              return [keys, left](const Row& r) {
                auto k = Matching::key(r, left);
                return k && keys->count(*k) != 0;
              };
            },
        },
        c->node);
  }

  const RelationSource& source_;
  Analyzer analyzer_;
};

}  // namespace

void Relation::canonicalize() {
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
}

Relation eval(const Query& q, const RelationSource& source) {
  Evaluator ev(source);
  ev.analyzer().header(q);
  return ev.run(q);
}

Relation eval_restrict(const Relation& rel, const Condition& cond, Polarity polarity, const RelationSource& source) {
  Evaluator ev(source);
  Relation out = ev.filter(rel, cond, polarity);
  out.canonicalize();
  return out;
}

std::vector<std::string> audit_relation(const Relation& rel) {
  std::vector<std::string> problems;
  const std::size_t pk = rel.header.primary_count();
  for (std::size_t i = 0; i < rel.header.attrs.size(); ++i) {
    if (rel.header.attrs[i].primary != (i < pk)) {
      problems.push_back("primary attributes do not lead the header");
      break;
    }
  }
  for (std::size_t r = 0; r < rel.rows.size(); ++r) {
    const Row& row = rel.rows[r];
    if (row.size() != rel.header.attrs.size()) {
      problems.push_back("row " + std::to_string(r) + " has wrong arity");
      continue;
    }
    for (std::size_t i = 0; i < pk; ++i) {
      if (is_null(row[i])) problems.push_back("null in primary attribute " + rel.header.attrs[i].name);
    }
    if (r > 0) {
      const Row& prev = rel.rows[r - 1];
      if (!(prev < row)) problems.push_back("rows not in canonical order at " + std::to_string(r));
      if (prev.size() == row.size() && std::equal(prev.begin(), prev.begin() + static_cast<std::ptrdiff_t>(pk), row.begin())) {
        problems.push_back("duplicate primary key at row " + std::to_string(r));
      }
    }
  }
  return problems;
}

const Value& value_of(const Relation& rel, const Row& row, const std::string& attr) {
  auto i = rel.header.index_of(attr);
  if (!i) throw Error(ErrorCode::UnknownAttribute, "unknown attribute " + attr);
  return row[*i];
}

}  // namespace dj
