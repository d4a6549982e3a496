#include "support/properties.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include "dj/parser.hpp"
#include "dj/printer.hpp"
#include "dj/transpile.hpp"
#include "support/oracle.hpp"
#include "support/sql.hpp"

namespace dj::test {

using namespace ast;

void CheckResult::fail(const std::string& what) {
  ++failed;
  if (failures.size() < 5) failures.push_back(what);
}

void CheckResult::merge(const CheckResult& other) {
  cases += other.cases;
  failed += other.failed;
  for (const auto& f : other.failures) {
    if (failures.size() < 5) failures.push_back(f);
  }
}

std::string CheckResult::summary() const {
  std::ostringstream out;
  out << cases << " cases, " << failed << " failed";
  for (const auto& f : failures) out << "\n  " << f;
  return out.str();
}

namespace {

std::vector<std::string> rows_of(const Relation& r) { return canonical_rows(r); }

std::string show(const Query& q) { return to_source(q); }

}  // namespace

// ---- query generation ----------------------------------------------------------

QueryGen::QueryGen(const Store& store, std::uint64_t seed) : store_(store), rng_(seed) {
  for (const auto& name : store.catalog().names()) {
    bases_.push_back(name);
    const Relation& rel = store.base(name);
    for (const auto& row : rel.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (!is_null(row[i])) pool_[rel.header.attrs[i].name].push_back(row[i]);
      }
    }
  }
}

std::size_t QueryGen::pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

bool QueryGen::chance(double p) { return std::bernoulli_distribution(p)(rng_); }

Value QueryGen::sample(const Attribute& a) {
  const auto it = pool_.find(a.name);
  if (it != pool_.end() && !it->second.empty() && !chance(0.1)) return it->second[pick(it->second.size())];
  if (a.type.is_numeric()) return Value{static_cast<std::int64_t>(pick(6))};
  if (a.type.kind == Datatype::Kind::Date) return Value{std::string("2000-01-01")};
  return Value{std::string("zz")};
}

Condition QueryGen::atom(const Header& h) {
  if (h.attrs.empty()) return chance(0.5) ? mapping({}) : any_of({});
  const Attribute& a = h.attrs[pick(h.attrs.size())];
  static const CmpOp ops[] = {CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge};
  switch (pick(5)) {
    case 0:
      return in_list(attr(a.name), {sample(a), sample(a)});
    case 1:
      if (chance(0.3)) return mapping({{"absent_attr", Value{std::int64_t{1}}}});
      return mapping({{a.name, sample(a)}});
    case 2: {
      for (const auto& b : h.attrs) {
        if (b.name != a.name && b.type.is_numeric() == a.type.is_numeric() && b.type.kind == a.type.kind) {
          return cmp(ops[pick(6)], attr(a.name), attr(b.name));
        }
      }
      return cmp(CmpOp::Eq, attr(a.name), lit(sample(a)));
    }
    default:
      return cmp(ops[pick(6)], attr(a.name), lit(sample(a)));
  }
}

Condition QueryGen::condition(const Header& h, int depth) {
  if (depth <= 0 || chance(0.5)) return atom(h);
  switch (pick(3)) {
    case 0: return any_of({condition(h, depth - 1), condition(h, depth - 1)});
    case 1: return all_of({condition(h, depth - 1), condition(h, depth - 1)});
    default: return negate(condition(h, depth - 1));
  }
}

Query QueryGen::attempt(int depth) {
  if (depth <= 0 || chance(0.2)) return base(bases_[pick(bases_.size())]);
  const Catalog& catalog = store_.catalog();
  Query a = query(depth - 1);
  const Header h = analyze(a, catalog);
  switch (pick(9)) {
    case 0: return restrict(a, condition(h, 2));
    case 1: return exclude(a, condition(h, 2));
    case 2: return restrict(a, subquery(query(depth - 1)));
    case 3: return exclude(a, subquery(query(depth - 1)));
    case 4: return join(a, query(depth - 1));
    case 5: {
      std::vector<ProjItem> items;
      for (const auto& name : h.secondary_names()) {
        if (chance(0.5)) items.push_back(keep(name));
      }
      const auto secondary = h.secondary_names();
      if (!secondary.empty() && chance(0.3)) {
        const std::string s = secondary[pick(secondary.size())];
        items.push_back(rename("r_" + s, s));
      }
      for (const auto& at : h.attrs) {
        if (at.type.is_numeric() && chance(0.3)) {
          items.push_back(compute("c_" + at.name, arith(ArithOp::Mul, attr(at.name), lit(Value{std::int64_t{2}}))));
          break;
        }
      }
      return project(a, items);
    }
    case 6: {
      Query b = query(depth - 1);
      const Header hb = analyze(b, catalog);
      std::vector<ProjItem> items{compute("n", call("count", {}))};
      for (const auto& at : hb.attrs) {
        if (at.type.is_numeric() && !h.has(at.name) && chance(0.5)) {
          static const char* fns[] = {"sum", "max", "min", "avg"};
          items.push_back(compute("f_" + at.name, call(fns[pick(4)], {attr(at.name)})));
          break;
        }
      }
      return aggregate(a, b, items);
    }
    case 7: return unite(restrict(a, condition(h, 1)), restrict(a, condition(h, 1)));
    default: {
      std::vector<std::string> attrs;
      for (const auto& name : h.names()) {
        if (chance(0.4)) attrs.push_back(name);
      }
      if (attrs.empty() && !h.attrs.empty()) attrs.push_back(h.names().front());
      return restrict(universal(attrs), subquery(a));
    }
  }
}

Query QueryGen::query(int depth) {
  for (int tries = 0; tries < 25; ++tries) {
    try {
      Query q = attempt(depth);
      analyze(q, store_.catalog());
      return q;
    } catch (const Error&) {
    }
  }
  return base(bases_[pick(bases_.size())]);
}

// ---- algebraic properties --------------------------------------------------------

CheckResult check_oracle(const Store& store, std::uint64_t seed, std::size_t cases) {
  CheckResult r;
  QueryGen gen(store, seed);
  for (std::size_t i = 0; i < cases; ++i) {
    const Query q = gen.query(3);
    ++r.cases;
    try {
      const Relation got = eval(q, store);
      const auto diff = compare(got, oracle_eval(q, store));
      if (!diff.empty()) r.fail(show(q) + ": " + diff);
      const auto audit = audit_relation(got);
      if (!audit.empty()) r.fail(show(q) + ": audit " + audit.front());
    } catch (const Error& e) {
      r.fail(show(q) + ": " + e.what());
    }
  }
  return r;
}

CheckResult check_split(const Store& store, std::uint64_t seed, std::size_t cases) {
  CheckResult r;
  QueryGen gen(store, seed);
  for (std::size_t i = 0; i < cases; ++i) {
    const Query a = gen.query(2);
    Condition c = gen.condition(analyze(a, store.catalog()), 2);
    if (gen.chance(0.3)) {
      for (int k = 0; k < 10; ++k) {
        try {
          const Condition s = subquery(gen.query(1));
          analyze(restrict(a, s), store.catalog());
          c = s;
          break;
        } catch (const Error&) {
        }
      }
    }
    ++r.cases;
    try {
      const auto all = rows_of(eval(a, store));
      const auto in = rows_of(eval(restrict(a, c), store));
      const auto out = rows_of(eval(exclude(a, c), store));
      const auto united = rows_of(eval(unite(restrict(a, c), exclude(a, c)), store));
      std::vector<std::string> both;
      std::set_intersection(in.begin(), in.end(), out.begin(), out.end(), std::back_inserter(both));
      if (united != all) r.fail("(A & c) + (A \\ c) != A for " + show(restrict(a, c)));
      if (!both.empty()) r.fail("A & c and A \\ c overlap for " + show(restrict(a, c)));
    } catch (const Error& e) {
      r.fail(show(restrict(a, c)) + ": " + e.what());
    }
  }
  return r;
}

CheckResult check_de_morgan(const Store& store, std::uint64_t seed, std::size_t cases) {
  CheckResult r;
  QueryGen gen(store, seed);
  for (std::size_t i = 0; i < cases; ++i) {
    const Query a = gen.query(2);
    const Header h = analyze(a, store.catalog());
    const Condition c1 = gen.condition(h, 1);
    const Condition c2 = gen.condition(h, 1);
    ++r.cases;
    try {
      auto same = [&](const Query& x, const Query& y, const char* law) {
        if (rows_of(eval(x, store)) != rows_of(eval(y, store))) r.fail(std::string(law) + ": " + show(x) + " vs " + show(y));
      };
      same(restrict(a, negate(any_of({c1, c2}))), restrict(a, all_of({negate(c1), negate(c2)})), "Not(c1 | c2)");
      same(restrict(a, negate(all_of({c1, c2}))), restrict(a, any_of({negate(c1), negate(c2)})), "Not(c1 & c2)");
      same(exclude(a, any_of({c1, c2})), exclude(exclude(a, c1), c2), "A \\ [c1, c2]");
      same(exclude(a, all_of({c1, c2})), unite(exclude(a, c1), exclude(a, c2)), "A \\ And(c1, c2)");
      same(restrict(a, negate(negate(c1))), restrict(a, c1), "Not Not");
    } catch (const Error& e) {
      r.fail(show(a) + ": " + e.what());
    }
  }
  return r;
}

CheckResult check_empty_conditions(const Store& store, std::uint64_t seed, std::size_t cases) {
  CheckResult r;
  QueryGen gen(store, seed);
  for (std::size_t i = 0; i < cases; ++i) {
    const Query a = gen.query(3);
    ++r.cases;
    try {
      const auto all = rows_of(eval(a, store));
      if (rows_of(eval(restrict(a, mapping({})), store)) != all) r.fail("A & {} != A for " + show(a));
      if (!eval(exclude(a, mapping({})), store).empty()) r.fail("A \\ {} not empty for " + show(a));
      if (!eval(restrict(a, any_of({})), store).empty()) r.fail("A & [] not empty for " + show(a));
      if (rows_of(eval(restrict(a, all_of({})), store)) != all) r.fail("A & And() != A for " + show(a));
      if (rows_of(eval(exclude(a, any_of({})), store)) != all) r.fail("A \\ [] != A for " + show(a));
    } catch (const Error& e) {
      r.fail(show(a) + ": " + e.what());
    }
  }
  return r;
}

CheckResult check_join_laws(const Store& store, std::uint64_t seed, std::size_t cases) {
  CheckResult r;
  QueryGen gen(store, seed);
  const Catalog& catalog = store.catalog();
  auto valid = [&](const Query& q) {
    try {
      analyze(q, catalog);
      return true;
    } catch (const Error&) {
      return false;
    }
  };
  std::size_t associative = 0;
  for (std::size_t i = 0; i < cases; ++i) {
    Query a = gen.query(2);
    Query b = gen.query(2);
    Query c = gen.query(1);
    for (int k = 0; k < 10 && !valid(join(a, b)); ++k) b = gen.query(2);
    ++r.cases;
    try {
      // NULL never matches in a join, so idempotence needs null-free rows
      const Relation ra = eval(a, store);
      const bool has_null = std::any_of(ra.rows.begin(), ra.rows.end(), [](const Row& row) {
        return std::any_of(row.begin(), row.end(), [](const Value& v) { return is_null(v); });
      });
      if (!has_null && rows_of(eval(join(a, a), store)) != rows_of(ra)) r.fail("A * A != A for " + show(a));
      if (has_null && eval(join(a, a), store).size() > ra.size()) r.fail("A * A grew for " + show(a));
      if (!valid(join(a, b))) continue;
      if (rows_of(eval(join(a, b), store)) != rows_of(eval(join(b, a), store))) {
        r.fail("A * B != B * A for " + show(join(a, b)));
      }
      if (valid(join(join(a, b), c)) && valid(join(a, join(b, c)))) {
        ++associative;
        if (rows_of(eval(join(join(a, b), c), store)) != rows_of(eval(join(a, join(b, c)), store))) {
          r.fail("(A * B) * C != A * (B * C) for " + show(join(join(a, b), c)));
        }
      }
    } catch (const Error& e) {
      r.fail(show(join(a, b)) + ": " + e.what());
    }
  }
  if (associative < cases / 4) r.fail("too few associativity cases: " + std::to_string(associative));
  return r;
}

CheckResult check_cardinality(const Store& store, std::uint64_t seed, std::size_t cases) {
  CheckResult r;
  QueryGen gen(store, seed);
  for (std::size_t i = 0; i < cases; ++i) {
    const Query a = gen.query(2);
    const Header h = analyze(a, store.catalog());
    if (h.universal) {
      --i;
      continue;
    }
    ++r.cases;
    try {
      const std::size_t n = eval(a, store).size();
      std::vector<ProjItem> items;
      for (const auto& s : h.secondary_names()) {
        if (gen.chance(0.5)) items.push_back(keep(s));
      }
      if (eval(project(a, items), store).size() != n) r.fail("projection changed cardinality of " + show(a));
      const Query b = gen.query(1);
      const Query g = aggregate(a, b, {compute("n", call("count", {}))});
      try {
        analyze(g, store.catalog());
      } catch (const Error&) {
        continue;
      }
      const Relation agg = eval(g, store);
      if (agg.size() != n) r.fail("aggregation changed cardinality of " + show(g));
      if (!audit_relation(agg).empty()) r.fail("audit failed for " + show(g));
    } catch (const Error& e) {
      r.fail(show(a) + ": " + e.what());
    }
  }
  return r;
}

CheckResult check_round_trip(const Store& store, std::uint64_t seed, std::size_t cases) {
  CheckResult r;
  QueryGen gen(store, seed);
  for (std::size_t i = 0; i < cases; ++i) {
    const Query q = gen.query(4);
    ++r.cases;
    const std::string text = to_source(q);
    try {
      const Query back = parse_query(text);
      if (!equal(q, back)) r.fail("round trip changed " + text + " into " + to_source(back));
    } catch (const Error& e) {
      r.fail(text + ": " + e.what());
    }
  }
  return r;
}

CheckResult check_sql_equivalence(const Store& store, const std::string& schema_and_seed, std::uint64_t seed,
                                  std::size_t cases) {
  CheckResult r;
  const SqlOptions generic{Dialect::Generic, true};
  SqliteDb db;
  {
    Store schema;
    for (const auto& st : parse_script(schema_and_seed)) {
      if (const auto* d = std::get_if<EntityDecl>(&st.node)) {
        schema = schema.declare(*d);
        db.exec(ddl_to_sql(schema.catalog(), d->name, generic));
      } else if (const auto* m = std::get_if<Manipulation>(&st.node)) {
        db.exec(manipulation_to_sql(schema.catalog(), *m, generic));
      }
    }
  }
  QueryGen gen(store, seed);
  for (std::size_t i = 0; i < cases; ++i) {
    const Query q = gen.query(3);
    ++r.cases;
    std::string sql;
    try {
      sql = query_to_sql(store.catalog(), q, generic);
      const auto got = canonical_rows(db.query(sql));
      if (got != rows_of(eval(q, store))) r.fail(show(q) + "\n    " + sql);
    } catch (const std::exception& e) {
      r.fail(show(q) + ": " + e.what() + "\n    " + sql);
    }
  }
  return r;
}

// ---- schemas ------------------------------------------------------------------------

CheckResult check_topo_order(std::uint64_t seed, std::size_t schemas) {
  CheckResult r;
  std::mt19937_64 rng(seed);
  for (std::size_t s = 0; s < schemas; ++s) {
    ++r.cases;
    const std::size_t n = 3 + rng() % 12;
    std::set<std::pair<std::string, std::string>> intended;
    Store store;
    // shuffle names so declaration order and name order disagree
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("T" + std::to_string(i));
    std::shuffle(names.begin(), names.end(), rng);
    for (std::size_t i = 0; i < n; ++i) {
      std::string text = "::" + names[i] + "\nid" + std::to_string(i) + " : int\n";
      std::string secondary;
      for (std::size_t j = 0; j < i; ++j) {
        if (rng() % 4 != 0) continue;
        intended.insert({names[i], names[j]});
        (rng() % 2 ? text : secondary) += "-> " + names[j] + "\n";
      }
      text += "---\nv : int\n" + secondary;
      try {
        store = store.declare(std::get<EntityDecl>(parse_script(text).at(0).node));
      } catch (const Error& e) {
        r.fail("declaring " + names[i] + ": " + e.what());
      }
    }
    const Catalog& c = store.catalog();
    const auto edge_list = c.edges();
    std::set<std::pair<std::string, std::string>> edges(edge_list.begin(), edge_list.end());
    if (edges != intended) r.fail("edge set differs from declarations");
    const auto order = topo_order(c);
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    if (order.size() != n || pos.size() != n) r.fail("topo_order is not a permutation");
    for (const auto& [from, to] : edges) {
      if (pos[to] >= pos[from]) r.fail(to + " does not precede " + from);
    }
    // a reference to a set that is not declared yet cannot be made, so no cycle can form
    try {
      store.declare(std::get<EntityDecl>(parse_script("::Loop\n-> Loop\n").at(0).node));
      r.fail("self reference accepted");
    } catch (const Error&) {
    }
  }
  return r;
}

// ---- Order workload ----------------------------------------------------------------

namespace {

Value str(const std::string& s) { return Value{s}; }
Value num(std::int64_t v) { return Value{v}; }

InsertBlock block(const std::string& entity, std::vector<std::string> attrs, std::vector<Row> rows) {
  return InsertBlock{entity, std::move(attrs), std::move(rows)};
}

struct Op {
  std::string name;
  bool must_fail = false;
  std::function<Store(const Store&)> apply;
};

}  // namespace

CheckResult check_order_workload(const Store& order_schema, std::uint64_t seed, std::size_t runs, std::size_t ops) {
  CheckResult r;
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  const std::vector<std::string> cust_attrs{"customer", "customer_name", "customer_address"};
  const std::vector<std::string> prod_attrs{"product", "product_name", "product_description"};
  const std::vector<std::string> order_attrs{"order", "customer", "order_datetime"};
  const std::vector<std::string> item_attrs{"order", "item", "product", "unit", "price", "quantity"};
  const std::vector<std::string> ship_attrs{"order", "ship_date", "carrier"};

  for (std::size_t run = 0; run < runs; ++run) {
    Store store = order_schema;
    int next_id = 0;
    std::size_t rejected = 0;
    auto existing = [&](const Store& s, const std::string& entity, const std::string& attr) -> std::optional<Value> {
      const Relation& rel = s.base(entity);
      if (rel.empty()) return std::nullopt;
      return value_of(rel, rel.rows[pick(rel.size())], attr);
    };
    for (std::size_t step = 0; step < ops; ++step) {
      ++r.cases;
      const int id = ++next_id;
      const auto customer = existing(store, "Customer", "customer");
      const auto product = existing(store, "Product", "product");
      const auto order = existing(store, "Order", "order");
      Op op;
      const std::size_t kind = pick(17);
      switch (kind) {
        case 0:
        case 1:
          op = {"insert customer", false, [&](const Store& s) {
                  return s.insert(block("Customer", cust_attrs, {{str("C" + std::to_string(id)), str("Name"), str("Addr")}}));
                }};
          break;
        case 2:
          op = {"insert product", false, [&](const Store& s) {
                  return s.insert(block("Product", prod_attrs, {{str("P" + std::to_string(id)), str("Thing"), str("desc")}}));
                }};
          break;
        case 3:
        case 4: {
          if (!customer || !product) continue;
          std::vector<Row> items;
          const std::size_t n = pick(4);
          for (std::size_t k = 0; k < n; ++k) {
            items.push_back({num(id), num(static_cast<std::int64_t>(k + 1)), *existing(store, "Product", "product"),
                             str("each"), Value{static_cast<double>(pick(10000)) / 100.0},
                             Value{static_cast<double>(pick(100000)) / 1000.0}});
          }
          op = {"insert order with items", false, [&, items, c = *customer](const Store& s) {
                  return s.insert_master(block("Order", order_attrs, {{num(id), c, str("2021-03-04 10:00:00")}}),
                                         {block("Order.Item", item_attrs, items)});
                }};
          break;
        }
        case 5: {
          if (!order) continue;
          const Value o = *order;
          const bool shipped = !eval(restrict(base("Shipment"), mapping({{"order", o}})), store).empty();
          op = {"insert shipment", shipped, [o](const Store& s) {
                  return s.insert(block("Shipment", {"order", "ship_date", "carrier"}, {{o, str("2021-04-01"), Value{Null{}}}}));
                }};
          break;
        }
        case 6: {
          static const char* entities[] = {"Customer", "Product", "Order", "Order.Item", "Shipment"};
          static const char* keys[] = {"customer", "product", "order", "item", "order"};
          const std::size_t e = pick(5);
          const auto v = existing(store, entities[e], keys[e]);
          if (!v) continue;
          op = {std::string("delete ") + entities[e], e == 3, [e, v](const Store& s) {
                  return s.remove(entities[e], mapping({{keys[e], *v}})).first;
                }};
          break;
        }
        case 7: {
          if (!customer) continue;
          op = {"update customer name", false, [c = *customer](const Store& s) {
                  return s.update("Customer", mapping({{"customer", c}}), {{"customer_name", str("Renamed")}});
                }};
          break;
        }
        case 8: {
          if (store.base("Order.Item").empty()) continue;
          const auto o = existing(store, "Order.Item", "order");
          op = {"update price", false, [o](const Store& s) {
                  return s.update("Order.Item", mapping({{"order", *o}}), {{"price", Value{12.5}}});
                }};
          break;
        }
        // injected violations
        case 9:
          if (!customer) continue;
          op = {"duplicate customer", true, [c = *customer](const Store& s) {
                  return s.insert(block("Customer", {"customer", "customer_name", "customer_address"}, {{c, str("X"), str("Y")}}));
                }};
          break;
        case 10:
          op = {"order for missing customer", true, [&](const Store& s) {
                  return s.insert_master(block("Order", order_attrs, {{num(id), str("NOPE"), str("2021-03-04 10:00:00")}}), {});
                }};
          break;
        case 11:
          if (!customer) continue;
          op = {"item with missing product", true, [&, c = *customer](const Store& s) {
                  return s.insert_master(block("Order", order_attrs, {{num(id), c, str("2021-03-04 10:00:00")}}),
                                         {block("Order.Item", item_attrs,
                                                {{num(id), num(1), str("NOPE"), str("each"), Value{1.0}, Value{1.0}}})});
                }};
          break;
        case 12:
          if (!product) continue;
          op = {"part row without its master", true, [&, p = *product](const Store& s) {
                  return s.insert(block("Order.Item", item_attrs, {{num(id), num(1), p, str("each"), Value{1.0}, Value{1.0}}}));
                }};
          break;
        case 13:
          if (!customer) continue;
          op = {"primary key update", true, [c = *customer](const Store& s) {
                  return s.update("Customer", mapping({{"customer", c}}), {{"customer", str("C0")}});
                }};
          break;
        case 14:
          if (!order || !customer) continue;
          op = {"foreign key update", true, [o = *order, c = *customer](const Store& s) {
                  return s.update("Order", mapping({{"order", o}}), {{"customer", c}});
                }};
          break;
        case 15:
          op = {"overlong name", true, [&](const Store& s) {
                  return s.insert(block("Customer", cust_attrs, {{str("C" + std::to_string(id)), str(std::string(129, 'x')), str("A")}}));
                }};
          break;
        default:
          switch (pick(3)) {
            case 0:
              op = {"null name", true, [&](const Store& s) {
                      return s.insert(block("Customer", cust_attrs, {{str("C" + std::to_string(id)), Value{Null{}}, str("A")}}));
                    }};
              break;
            case 1:
              op = {"overlong key", true, [&](const Store& s) {
                      return s.insert(block("Customer", cust_attrs, {{str(std::string(17, 'c')), str("N"), str("A")}}));
                    }};
              break;
            default:
              if (!customer) continue;
              op = {"bad datetime", true, [&, c = *customer](const Store& s) {
                      return s.insert_master(block("Order", order_attrs, {{num(id), c, str("2021-13-45 99:00:00")}}), {});
                    }};
          }
          break;
      }
      const Store before = store;
      try {
        store = op.apply(before);
        if (op.must_fail) r.fail("run " + std::to_string(run) + " step " + std::to_string(step) + ": " + op.name + " accepted");
      } catch (const Error& e) {
        ++rejected;
        if (!op.must_fail) {
          r.fail("run " + std::to_string(run) + " step " + std::to_string(step) + ": " + op.name + " rejected: " + e.what());
        }
        if (!(store == before)) r.fail(op.name + ": rejected operation changed the store");
      }
      const auto audit = store.audit();
      if (!audit.empty()) r.fail("audit after " + op.name + ": " + audit.front());
    }
    if (rejected == 0) r.fail("run " + std::to_string(run) + " injected nothing");
  }
  return r;
}

// ---- cascade ----------------------------------------------------------------------

namespace {

struct RandomSchema {
  Store store;
  std::vector<std::string> names;
};

// Roots, subtypes of roots (same key), unions of subtypes and general sets
// with primary, secondary, nullable and restricted dependencies.
RandomSchema random_schema(std::mt19937_64& rng) {
  RandomSchema s;
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  std::map<std::string, std::vector<std::string>> subtypes;  // root -> subtypes
  std::vector<std::string> roots;
  const std::size_t n = 3 + pick(5);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string name = "E" + std::to_string(i);
    std::vector<std::string> texts;
    const std::size_t kind = i == 0 ? 0 : pick(4);
    if (kind == 1 && !roots.empty()) {
      const auto& root = roots[pick(roots.size())];
      texts.push_back("::" + name + "\n-> " + root + "\n---\nv" + std::to_string(i) + " : int\n");
      subtypes[root].push_back(name);
    } else if (kind == 2) {
      for (const auto& [root, subs] : subtypes) {
        if (subs.size() >= 2) {
          texts.push_back("::" + name + "\n-> " + subs[0] + ".proj() + " + subs[1] + ".proj()\n---\nv" +
                          std::to_string(i) + " : int\n");
          break;
        }
      }
    } else if (kind == 3) {
      std::string primary;
      std::string secondary;
      for (std::size_t d = 0; d < 2 && !s.names.empty(); ++d) {
        const auto& target = s.names[pick(s.names.size())];
        const auto& key = s.store.catalog().get(target).primary_key.front();
        switch (pick(4)) {
          case 0: primary += "-> " + target + "\n"; break;
          case 1: secondary += "-> " + target + "\n"; break;
          case 2: secondary += "-> [nullable] " + target + "\n"; break;
          default: secondary += "-> " + target + " & " + key + " < 4\n"; break;
        }
      }
      const std::string own = "a" + std::to_string(i) + " : int\n";
      texts.push_back("::" + name + "\n" + primary + own + "---\nv" + std::to_string(i) + " : int\n" + secondary);
      texts.push_back("::" + name + "\n" + primary + own + "---\nv" + std::to_string(i) + " : int\n");
    }
    texts.push_back("::" + name + "\na" + std::to_string(i) + " : int\n---\nv" + std::to_string(i) + " : int\n");
    for (const auto& text : texts) {
      try {
        s.store = s.store.declare(std::get<EntityDecl>(parse_script(text).at(0).node));
        s.names.push_back(name);
        if (text == texts.back() || text.find("->") == std::string::npos) roots.push_back(name);
        break;
      } catch (const Error&) {
      }
    }
  }
  return s;
}

void fill(RandomSchema& s, std::mt19937_64& rng) {
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  for (const auto& name : s.names) {
    const EntitySetDef& def = s.store.catalog().get(name);
    const Header h = def.header();
    for (int attempt = 0; attempt < 8; ++attempt) {
      Row row(h.attrs.size());
      for (std::size_t i = 0; i < h.attrs.size(); ++i) row[i] = Value{static_cast<std::int64_t>(pick(7))};
      for (const auto& dep : def.dependencies) {
        const Relation target = eval(dep.target, s.store);
        if (dep.nullable && pick(4) == 0) {
          for (const auto& a : dep.fk_attrs) row[*h.index_of(a)] = Value{Null{}};
          continue;
        }
        if (target.empty()) continue;
        const Row& t = target.rows[pick(target.size())];
        for (const auto& a : dep.fk_attrs) row[*h.index_of(a)] = value_of(target, t, a);
      }
      try {
        s.store = s.store.insert(InsertBlock{name, h.names(), {row}});
      } catch (const Error&) {
      }
    }
  }
}

using RowSets = std::map<std::string, std::set<Row>>;

// Fixpoint: a row goes when one of its non-null references finds no key in
// the remaining rows of its (restriction-free) target.
RowSets closure(const Store& store, const std::string& entity, const Condition& cond) {
  std::map<std::string, std::vector<Row>> remaining;
  for (const auto& name : store.catalog().names()) remaining[name] = store.base(name).rows;
  std::set<Row> first;
  const auto matched = oracle_eval(restrict(base(entity), cond), store);
  const Header h = store.catalog().get(entity).header();
  for (const auto& tuple : matched.rows) {
    Row row;
    for (const auto& a : h.attrs) row.push_back(tuple.at(a.name));
    first.insert(row);
  }
  auto& rows = remaining[entity];
  rows.erase(std::remove_if(rows.begin(), rows.end(), [&](const Row& x) { return first.count(x) != 0; }), rows.end());
  for (bool changed = true; changed;) {
    changed = false;
    Store current = store;
    for (const auto& [name, rs] : remaining) current = current.with_rows(name, rs);
    for (const auto& name : store.catalog().names()) {
      const EntitySetDef& def = store.catalog().get(name);
      const Header dh = def.header();
      for (const auto& dep : def.dependencies) {
        const auto target = oracle_eval(strip_restrictions(dep.target), current);
        std::set<std::vector<Value>> keys;
        for (const auto& t : target.rows) {
          std::vector<Value> k;
          for (const auto& a : dep.fk_attrs) k.push_back(t.at(a));
          keys.insert(k);
        }
        auto& mine = remaining[name];
        const auto before = mine.size();
        mine.erase(std::remove_if(mine.begin(), mine.end(),
                                  [&](const Row& x) {
                                    std::vector<Value> k;
                                    for (const auto& a : dep.fk_attrs) {
                                      const Value& v = x[*dh.index_of(a)];
                                      if (is_null(v)) return false;
                                      k.push_back(v);
                                    }
                                    return keys.count(k) == 0;
                                  }),
                   mine.end());
        changed = changed || mine.size() != before;
      }
    }
  }
  RowSets removed;
  for (const auto& name : store.catalog().names()) {
    std::set<Row> kept(remaining[name].begin(), remaining[name].end());
    for (const auto& row : store.base(name).rows) {
      if (!kept.count(row)) removed[name].insert(row);
    }
  }
  return removed;
}

}  // namespace

CheckResult check_cascade(std::uint64_t seed, std::size_t cases) {
  CheckResult r;
  std::mt19937_64 rng(seed);
  std::size_t unions = 0;
  std::size_t nontrivial = 0;
  for (std::size_t i = 0; i < cases; ++i) {
    RandomSchema s = random_schema(rng);
    fill(s, rng);
    for (const auto& name : s.names) {
      for (const auto& dep : s.store.catalog().get(name).dependencies) unions += dep.is_union() ? 1 : 0;
    }
    std::vector<std::string> filled;
    for (const auto& name : s.names) {
      if (!s.store.base(name).empty()) filled.push_back(name);
    }
    if (filled.empty()) continue;
    ++r.cases;
    const std::string entity = filled[rng() % filled.size()];
    const Relation& rel = s.store.base(entity);
    const Row& row = rel.rows[rng() % rel.size()];
    const std::size_t col = rng() % row.size();
    Condition cond = rng() % 5 == 0 ? mapping({}) : mapping({{rel.header.attrs[col].name, row[col]}});
    try {
      const auto [after, report] = s.store.remove(entity, cond);
      const RowSets expected = closure(s.store, entity, cond);
      RowSets actual;
      std::size_t total = 0;
      for (const auto& name : s.names) {
        std::set<Row> kept(after.base(name).rows.begin(), after.base(name).rows.end());
        for (const auto& x : s.store.base(name).rows) {
          if (!kept.count(x)) actual[name].insert(x);
        }
        total += actual[name].size();
        if (report.count(name) != actual[name].size()) r.fail("report count differs for " + name);
        if (actual[name].empty()) actual.erase(name);
      }
      nontrivial += expected.size() > 1 ? 1 : 0;
      if (actual != expected) {
        std::string names;
        for (const auto& n : s.names) names += n + ":" + to_source(s.store.catalog().get(n).decl) + "\n";
        r.fail("delete from " + entity + " " + to_source(cond) + " removed " + std::to_string(total) +
               " rows, closure differs\n" + names);
      }
      const auto audit = after.audit();
      if (!audit.empty()) r.fail("audit after delete: " + audit.front());
    } catch (const Error& e) {
      r.fail(std::string("delete raised ") + e.what());
    }
  }
  if (unions == 0) r.fail("no union dependencies generated");
  if (nontrivial < r.cases / 10) r.fail("too few cascading deletes: " + std::to_string(nontrivial));
  return r;
}

}  // namespace dj::test
