#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "dj/algebra.hpp"
#include "dj/parser.hpp"
#include "dj/printer.hpp"
#include "dj/session.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

namespace dj {
namespace {

class University : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { store_ = new Store(test::university()); }
  static void TearDownTestSuite() { delete store_; }

  static Relation run(const std::string& text) { return eval(parse_query(text), *store_); }

  static std::set<std::int64_t> ids(const Relation& r, const std::string& attr = "student_id") {
    std::set<std::int64_t> out;
    for (const auto& row : r.rows) out.insert(std::get<std::int64_t>(value_of(r, row, attr)));
    return out;
  }

  static ErrorCode error_of(const std::string& text) {
    try {
      run(text);
    } catch (const Error& e) {
      return e.code();
    }
    ADD_FAILURE() << "no error for " << text;
    return ErrorCode::ParseError;
  }

  static Store* store_;
};

Store* University::store_ = nullptr;

TEST_F(University, SeedIsLargeEnough) {
  EXPECT_GE(store_->base("Student").size(), 8u);
  EXPECT_EQ(store_->base("Department").size(), 3u);
  EXPECT_EQ(store_->base("Course").size(), 6u);
  EXPECT_EQ(store_->base("Term").size(), 2u);
  EXPECT_TRUE(store_->audit().empty());
}

TEST_F(University, QuerySuiteMatchesOracle) {
  Session session(*store_);
  int queries = 0;
  for (const auto& st : parse_script(test::read_data("university_queries.dj"))) {
    Outcome out = session.execute(st);
    if (out.kind != Outcome::Kind::Queried) continue;
    ++queries;
    SCOPED_TRACE(st.text);
    const auto expected = test::oracle_eval(out.query, session.store());
    EXPECT_EQ(test::compare(*out.result, expected), "");
    EXPECT_TRUE(audit_relation(*out.result).empty());
  }
  EXPECT_GE(queries, 35);
}

TEST_F(University, RestrictionsBySets) {
  EXPECT_EQ(ids(run("Student \\ Enroll")), (std::set<std::int64_t>{1004}));
  EXPECT_EQ(ids(run("Student \\ StudentMajor")), (std::set<std::int64_t>{1004, 1007, 1009}));
  EXPECT_EQ(run("Student & Enroll").size(), 9u);
  EXPECT_EQ(ids(run("Student & (Enroll & dept == \"BIOL\") \\ (Enroll & dept == \"MATH\")")),
            (std::set<std::int64_t>{1003, 1008, 1009}));
  EXPECT_EQ(ids(run("Student & home_state in [\"OK\", \"NM\", \"TX\"]")),
            ids(run("Student & [home_state == \"OK\", home_state == \"NM\", home_state == \"TX\"]")));
}

TEST_F(University, MappingsAndEmptyConditions) {
  EXPECT_EQ(ids(run("Student & {first_name: \"Alice\", last_name: \"Cooper\", dept: \"MATH\"}")),
            (std::set<std::int64_t>{1002}));
  EXPECT_EQ(run("Student & {}").size(), 10u);
  EXPECT_EQ(run("Student & {dept: \"MATH\"}").size(), 10u);
  EXPECT_TRUE(run("Student \\ {}").empty());
  EXPECT_TRUE(run("Student & []").empty());
  EXPECT_EQ(run("Student \\ []").size(), 10u);
  EXPECT_EQ(run("Student & And([])").size(), 10u);
}

TEST_F(University, ZeroSharedAttributesUsePhantomKey) {
  EXPECT_EQ(run("Student & Department").size(), 10u);
  EXPECT_TRUE(run("Student & (Department & dept == \"NONE\")").empty());
  EXPECT_EQ(run("Student * Department").size(), 30u);
  EXPECT_EQ(run("Student & CurrentTerm").size(), 10u);
}

TEST_F(University, YearComparesWithDate) {
  Relation r = run("Student * Enroll & (term_year <= date_of_birth)");
  EXPECT_EQ(ids(r), (std::set<std::int64_t>{1007}));
}

TEST_F(University, SelfJoinThroughRename) {
  Relation r = run(
      "Student * Student.proj(student_id2: student_id, date_of_birth2: date_of_birth) & "
      "student_id < student_id2 & date_of_birth = date_of_birth2");
  EXPECT_EQ(r.size(), 2u);
  EXPECT_EQ(ids(r, "student_id2"), (std::set<std::int64_t>{1005, 1009}));
}

TEST_F(University, AggregationKeepsEmptyGroups) {
  Relation r = run("Section.aggr(Enroll, n: count())");
  EXPECT_EQ(r.size(), 9u);
  Relation cs = eval(ast::restrict(parse_query("Section.aggr(Enroll, n: count())"),
                                   parse_condition("{dept: \"CS\", course: 1410, term: \"Spring\"}")),
                     *store_);
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(std::get<std::int64_t>(value_of(cs, cs.rows[0], "n")), 0);
  Relation avg = run("Course.aggr(Grade * LetterGrade, avg_grade: avg(points)) & course == 2420");
  ASSERT_EQ(avg.size(), 1u);
  EXPECT_DOUBLE_EQ(std::get<double>(value_of(avg, avg.rows[0], "avg_grade")), 2.0);
}

TEST_F(University, UniversalSets) {
  EXPECT_EQ(std::get<std::int64_t>(run("U().aggr(Student, n: count())").rows.at(0).at(0)), 10);
  EXPECT_EQ(std::get<std::int64_t>(run("U().aggr(U(last_name) & Student, n: count())").rows.at(0).at(0)), 8);
  Relation states = run("U(home_state).aggr(Student, n: count())");
  EXPECT_EQ(states.size(), 6u);
  EXPECT_TRUE(states.header.attrs[0].primary);
  EXPECT_EQ(states.header.attrs[0].type, store_->catalog().get("Student").find("home_state")->type);
  Relation cities = run("U(home_city, home_state) & Student");
  EXPECT_EQ(cities.size(), 9u);
  EXPECT_EQ(cities.header.primary_count(), 2u);
}

TEST_F(University, ProjectionHeaders) {
  Relation r = run("StudentMajor.proj(major: dept)");
  ASSERT_EQ(r.header.attrs.size(), 2u);
  EXPECT_EQ(r.header.attrs[1].name, "major");
  Relation calc = run("(Grade * Course * LetterGrade).proj(total: points * credits)");
  EXPECT_EQ(calc.size(), store_->base("Grade").size());
  EXPECT_EQ(calc.header.primary_count(), 7u);  // grade joins the key through LetterGrade
}

TEST_F(University, Errors) {
  EXPECT_EQ(error_of("Course.proj(course_name) * Department.proj(course_name: dept_name)"), ErrorCode::NotJoinable);
  EXPECT_EQ(error_of("Student + Department"), ErrorCode::UnionIncompatible);
  EXPECT_EQ(error_of("Student.proj(n: count())"), ErrorCode::AggrFnOutsideAggregate);
  EXPECT_EQ(error_of("U(a) & a == 1"), ErrorCode::InvalidUniversalUse);
  EXPECT_EQ(error_of("U(home_state)"), ErrorCode::UniversalNotMaterializable);
  EXPECT_EQ(error_of("Student & nope == 1"), ErrorCode::UnknownAttribute);
  EXPECT_EQ(error_of("Nope"), ErrorCode::UnknownReference);
  EXPECT_EQ(error_of("Student & first_name > 3"), ErrorCode::TypeMismatch);
  EXPECT_EQ(error_of("Student.proj(student_id: first_name)"), ErrorCode::PrimaryRenameCollision);
  EXPECT_EQ(error_of("Student.proj(first_name, first_name: last_name)"), ErrorCode::DuplicateOutputName);
  EXPECT_EQ(error_of("(Student & student_id == 1000) + "
                     "(Student & student_id == 1000).proj(first_name: last_name, last_name: first_name, ...)"),
            ErrorCode::UnionOverlap);
}

// A namesake that is not homologous plays no part in matching and is an error only when used.
TEST_F(University, AggregationToleratesUnusedNamesakes) {
  const Relation r = run("Student.aggr(Enroll.proj(first_name: course), n: count())");
  const Relation plain = run("Student.aggr(Enroll, n: count())");
  EXPECT_EQ(r.rows, plain.rows);
  EXPECT_EQ(error_of("Student.aggr(Enroll.proj(first_name: course), m: max(first_name))"),
            ErrorCode::AmbiguousAttribute);
}

TEST_F(University, UnionMergesIdenticalRows) {
  Relation r = run("(Student & home_state == \"TX\") + (Student & sex == \"M\")");
  EXPECT_EQ(ids(r), (std::set<std::int64_t>{1001, 1002, 1003, 1005, 1007, 1009}));
}

TEST_F(University, ArithmeticRules) {
  Relation r = run("Course.proj(half: credits / 0, label: dept + \"-\", dbl: course * 2) & course == 1010");
  ASSERT_EQ(r.size(), 1u);
  EXPECT_TRUE(is_null(value_of(r, r.rows[0], "half")));
  EXPECT_EQ(std::get<std::string>(value_of(r, r.rows[0], "label")), "BIOL-");
  EXPECT_EQ(std::get<std::int64_t>(value_of(r, r.rows[0], "dbl")), 2020);
}

TEST_F(University, Statistics) {
  Relation r = run(
      "U().aggr(LetterGrade, lo: min(points), hi: max(points), med: median(points), "
      "p25: percentile(25, points), sd: stddev(points), v: var(points), s: sum(points))");
  ASSERT_EQ(r.size(), 1u);
  auto d = [&](const char* a) { return as_double(value_of(r, r.rows[0], a)); };
  EXPECT_DOUBLE_EQ(d("lo"), 0.0);
  EXPECT_DOUBLE_EQ(d("hi"), 4.0);
  EXPECT_DOUBLE_EQ(d("med"), 2.5);  // 0 1 2 3 3.67 4
  EXPECT_NEAR(d("p25"), 1.25, 1e-12);
  const double mean = 13.67 / 6;
  double ss = 0;
  for (double x : {0.0, 1.0, 2.0, 3.0, 3.67, 4.0}) ss += (x - mean) * (x - mean);
  EXPECT_NEAR(d("v"), ss / 6, 1e-12);
  EXPECT_NEAR(d("sd"), std::sqrt(ss / 6), 1e-12);
  EXPECT_NEAR(d("s"), 13.67, 1e-12);
}

TEST_F(University, EmptyGroupAggregatesAreNull) {
  Relation r = run("Student.aggr(Grade * LetterGrade, n: count(), s: sum(points), m: max(points)) & student_id == 1004");
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(std::get<std::int64_t>(value_of(r, r.rows[0], "n")), 0);
  EXPECT_TRUE(is_null(value_of(r, r.rows[0], "s")));
  EXPECT_TRUE(is_null(value_of(r, r.rows[0], "m")));
}

}  // namespace
}  // namespace dj
