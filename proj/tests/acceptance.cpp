// Standalone acceptance run: one line per criterion.
// Exits 0 when every mismatch is one of the known reference errata listed below.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "dj/compute.hpp"
#include "dj/parser.hpp"
#include "dj/session.hpp"
#include "dj/transpile.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"
#include "support/properties.hpp"
#include "support/sql.hpp"

namespace dj {
namespace {

const SqlOptions kPrinted{Dialect::MySQL, false};
const SqlOptions kGeneric{Dialect::Generic, true};

struct Verdict {
  bool pass = true;
  std::string detail;
  std::vector<std::string> mismatches;  // compared against the known list
};

// The printed reference leaves dept_phone nullable, and its CurrentTerm
// translation selects a column CurrentTerm lacks (equivalent under SQLite's
// correlated binding, textually different).
const std::set<std::string> kKnown = {
    "1:Department.dept_phone nullable vs NOT NULL",
    "5:Student \\(Enroll & CurrentTerm)",
};

bool contains(const std::string& text, const std::string& part) { return text.find(part) != std::string::npos; }

void load_into(test::SqliteDb& db, const Store& schema, const std::string& seed) {
  db.exec(schema_to_sql(schema.catalog(), kGeneric));
  for (const auto& st : parse_script(seed)) {
    if (const auto* m = std::get_if<ast::Manipulation>(&st.node)) {
      db.exec(manipulation_to_sql(schema.catalog(), *m, kGeneric));
    }
  }
}

Verdict schema_fidelity() {
  Verdict v;
  const Store store = test::university_schema();
  const auto printed = test::reference_tables(test::read_data("reference_translations.sql"));
  for (const auto& text : printed) {
    const auto expected = test::parse_create_table(text);
    const auto actual = test::parse_create_table(ddl_to_sql(store.catalog(), expected.name, kPrinted));
    for (auto& d : test::structural_diff(expected, actual)) v.mismatches.push_back(d);
  }
  v.pass = v.mismatches.empty() && printed.size() == 3;
  v.detail = std::to_string(printed.size()) + " tables, " + std::to_string(v.mismatches.size()) + " structural diffs";
  return v;
}

Verdict query_suite() {
  Verdict v;
  const Store store = test::university();
  Session session(store);
  int queries = 0;
  for (const auto& st : parse_script(test::read_data("university_queries.dj"))) {
    Outcome out = session.execute(st);
    if (out.kind != Outcome::Kind::Queried) continue;
    ++queries;
    const auto diff = test::compare(*out.result, test::oracle_eval(out.query, session.store()));
    if (!diff.empty() || !audit_relation(*out.result).empty()) v.mismatches.push_back(st.text);
  }
  const bool seeded = store.base("Student").size() >= 8 && store.base("Department").size() == 3 &&
                      store.base("Course").size() == 6 && store.base("Term").size() == 2;
  v.pass = v.mismatches.empty() && queries >= 35 && seeded;
  v.detail = std::to_string(queries) + " queries, " + std::to_string(v.mismatches.size()) + " differ";
  return v;
}

Verdict properties() {
  Verdict v;
  const Store store = test::university();
  constexpr std::size_t n = 1000;
  const std::vector<std::pair<std::string, test::CheckResult>> runs = {
      {"oracle+audit", test::check_oracle(store, 11, n)},
      {"split", test::check_split(store, 12, n)},
      {"de morgan", test::check_de_morgan(store, 13, n)},
      {"empty conditions", test::check_empty_conditions(store, 14, n)},
      {"join laws", test::check_join_laws(store, 15, n)},
      {"cardinality", test::check_cardinality(store, 16, n)},
  };
  std::size_t total = 0;
  for (const auto& [name, r] : runs) {
    total += r.cases;
    if (!r.ok() || r.cases < n) {
      v.pass = false;
      v.mismatches.push_back(name + ": " + r.summary());
    }
  }
  v.detail = std::to_string(runs.size()) + " families, " + std::to_string(total) + " cases";
  return v;
}

Verdict integrity() {
  const auto r = test::check_order_workload(test::order_schema(), 22, 10, 200);
  Verdict v;
  v.pass = r.ok() && r.cases == 2000;
  if (!r.ok()) v.mismatches.push_back(r.summary());
  v.detail = "10 runs x 200 ops, " + std::to_string(r.failed) + " failed";
  return v;
}

Verdict transpiler() {
  Verdict v;
  const Store store = test::university();
  const auto printed = test::reference_queries(test::read_data("reference_translations.sql"));
  int textual = 0;
  for (const auto& p : printed) {
    if (test::normalize_sql(query_to_sql(store.catalog(), parse_query(p.dj), kPrinted)) == test::normalize_sql(p.sql)) {
      ++textual;
    } else {
      v.mismatches.push_back(test::normalize_sql(p.dj));
    }
  }

  test::SqliteDb db;
  load_into(db, test::university_schema(), test::read_data("university_seed.dj"));
  Session session(store);
  int executed = 0;
  int skipped = 0;
  for (const auto& st : parse_script(test::read_data("university_queries.dj"))) {
    Outcome out = session.execute(st);
    if (out.kind != Outcome::Kind::Queried) continue;
    bool lacks = false;
    for (const char* f : {"median(", "percentile(", "stddev(", "var("}) lacks = lacks || contains(st.text, f);
    if (lacks) {
      ++skipped;
      continue;
    }
    try {
      const auto got = test::canonical_rows(db.query(query_to_sql(session.store().catalog(), out.query, kGeneric)));
      if (got != test::canonical_rows(*out.result)) v.mismatches.push_back("sqlite: " + st.text);
    } catch (const std::exception& e) {
      v.mismatches.push_back("sqlite: " + st.text + ": " + e.what());
    }
    ++executed;
  }
  v.pass = v.mismatches.empty() && printed.size() == 6;
  v.detail = std::to_string(textual) + "/" + std::to_string(printed.size()) + " printed translations, " +
             std::to_string(executed) + " executed on sqlite (" + std::to_string(skipped) + " skipped)";
  return v;
}

Verdict cascade() {
  const auto r = test::check_cascade(23, 500);
  Verdict v;
  v.pass = r.ok() && r.cases >= 400;
  if (!r.ok()) v.mismatches.push_back(r.summary());
  v.detail = std::to_string(r.cases) + " deletes, " + std::to_string(r.failed) + " differ";
  return v;
}

const char* kGrid = R"(
::P
p : int

::Q
q : int

::Computed
-> P
-> Q
---
value : int

insert P (p): (1), (2)
insert Q (q): (10), (20), (30)
)";

Verdict populate_grid() {
  Verdict v;
  const Store s = test::apply_script(Store{}, kGrid);
  int calls = 0;
  auto product = [&](const Relation& key, bool fail_one) {
    ++calls;
    const auto p = std::get<std::int64_t>(value_of(key, key.rows[0], "p"));
    const auto q = std::get<std::int64_t>(value_of(key, key.rows[0], "q"));
    if (fail_one && p == 2 && q == 20) throw std::runtime_error("make failed");
    MakeOutput out;
    out.rows.attrs = {"p", "q", "value"};
    out.rows.rows = {{Value{p}, Value{q}, Value{p * q}}};
    return out;
  };
  MakeFn make = [&](const RelationSource&, const Relation& key) { return product(key, false); };
  MakeFn flaky = [&](const RelationSource&, const Relation& key) { return product(key, true); };

  const auto domain = pending_keys(s, "Computed").size();
  auto [done, first] = populate(s, "Computed", make);
  auto [again, second] = populate(done, "Computed", make);
  const bool full = domain == 6 && first.made == 6 && calls == 6 && done.base("Computed").size() == 6;
  const bool idempotent = second.made == 0 && calls == 6 && again == done;
  if (!full) v.mismatches.push_back("first run made " + std::to_string(first.made));
  if (!idempotent) v.mismatches.push_back("second run made " + std::to_string(second.made));

  auto [partial, report] = populate(s, "Computed", flaky);
  const bool isolated = report.made == 5 && report.errors.size() == 1 && partial.base("Computed").size() == 5 &&
                        partial.audit().empty() && pending_keys(partial, "Computed").size() == 1;
  if (!isolated) v.mismatches.push_back("failing key: made " + std::to_string(report.made));
  v.pass = v.mismatches.empty();
  v.detail = "domain " + std::to_string(domain) + ", made " + std::to_string(first.made) + " then " +
             std::to_string(second.made) + ", with one failure made " + std::to_string(report.made);
  return v;
}

}  // namespace
}  // namespace dj

int main() {
  using Clock = std::chrono::steady_clock;
  const std::vector<std::pair<std::string, std::function<dj::Verdict()>>> criteria = {
      {"schema fidelity", dj::schema_fidelity}, {"query suite vs oracle", dj::query_suite},
      {"algebraic properties", dj::properties}, {"integrity workload", dj::integrity},
      {"transpiler goldens", dj::transpiler},   {"delete cascade closure", dj::cascade},
      {"populate 2x3 domain", dj::populate_grid},
  };
  bool unexpected = false;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = Clock::now();
    dj::Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("raised ") + e.what();
      v.mismatches.push_back(v.detail);
    }
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    std::vector<std::string> known;
    for (const auto& m : v.mismatches) {
      if (dj::kKnown.count(std::to_string(i + 1) + ":" + m)) {
        known.push_back(m);
      } else {
        unexpected = true;
      }
    }
    if (!v.pass && v.mismatches.empty()) unexpected = true;
    std::printf("[%s] %zu %s: %s (%.0f ms)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str(), ms);
    for (const auto& m : v.mismatches) {
      const bool k = std::find(known.begin(), known.end(), m) != known.end();
      std::printf("       %s %s\n", k ? "known:" : "unexpected:", m.c_str());
    }
  }
  return unexpected ? 1 : 0;
}
