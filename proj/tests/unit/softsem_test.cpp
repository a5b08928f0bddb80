#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "sqlsketch/error.hpp"
#include "sqlsketch/eval.hpp"
#include "sqlsketch/refine.hpp"
#include "sqlsketch/softsem.hpp"
#include "support.hpp"

namespace sqlsketch {
namespace {

using testing::toy_catalog;

ResultTable joined() {
  return evaluate(parse_sketch(testing::kThreeWayJoin, *toy_catalog()).from, *toy_catalog());
}

SoftPrimitive prim(SoftOp op, const char* table, const char* col, Value v, bool regex = false) {
  return {op, ColumnRef{table, col}, std::move(v), regex};
}

TEST(Softsem, PrimitivesOnTheJoinedTable) {
  ResultTable t = joined();
  EXPECT_EQ(score_primitive(prim(SoftOp::Contains, "authors", "name", Value(std::string(".*Church.*")), true), t), 1.0);
  EXPECT_EQ(score_primitive(prim(SoftOp::AtLeast, "publications", "year", Value(std::int64_t{1900})), t), 1.0);
  EXPECT_EQ(score_primitive(prim(SoftOp::AtMost, "publications", "year", Value(std::int64_t{2020})), t), 1.0);
  double below = score_primitive(prim(SoftOp::AtMost, "publications", "year", Value(std::int64_t{1940})), t);
  EXPECT_NEAR(below, 2.0 / 3.0, 1e-12);
}

TEST(Softsem, OtherForms) {
  ResultTable t = joined();
  // Turing appears twice among three rows.
  EXPECT_NEAR(score_primitive(prim(SoftOp::About, "authors", "name", Value(std::string("Alan.*")), true), t), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(score_primitive(prim(SoftOp::About, "publications", "year", Value(std::int64_t{1948})), t), 1.0 / 3.0, 1e-12);
  EXPECT_EQ(score_primitive(prim(SoftOp::Member, "publications", "year", Value(std::int64_t{1932})), t), 1.0);
  EXPECT_EQ(score_primitive(prim(SoftOp::Member, "publications", "year", Value(std::int64_t{1933})), t), 0.0);
  EXPECT_EQ(score_primitive(prim(SoftOp::Contains, "authors", "name", Value(std::string("Gödel")), true), t), 0.0);
}

TEST(Softsem, PrimitiveErrors) {
  ResultTable t = joined();
  auto code = [&](const SoftPrimitive& p, const ResultTable& tab) {
    try {
      score_primitive(p, tab);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::Io;
  };
  EXPECT_EQ(code(prim(SoftOp::AtLeast, "nope", "x", Value(std::int64_t{1})), t), Errc::ColumnAbsent);
  EXPECT_EQ(code(prim(SoftOp::AtLeast, "authors", "name", Value(std::int64_t{1})), t), Errc::TypeIncompatible);
  EXPECT_EQ(code(prim(SoftOp::Contains, "publications", "year", Value(std::string("1.*")), true), t), Errc::TypeIncompatible);
  ResultTable empty = t;
  empty.rows.clear();
  EXPECT_EQ(code(prim(SoftOp::AtMost, "publications", "year", Value(std::int64_t{1})), empty), Errc::EmptyColumn);
  EXPECT_EQ(score_primitive(prim(SoftOp::Contains, "authors", "name", Value(std::string(".*")), true), empty), 0.0);
}

TEST(Softsem, ExactScoreOfTheTarget) {
  EXPECT_DOUBLE_EQ(score_exact(testing::author_truth(), *toy_catalog()), 3.0);
  // A soft block on the selection sees only the selected rows.
  auto q = parse_sketch(
      "SELECT authors.name FROM (authors INNER-JOIN (writes INNER-JOIN publications ON "
      "writes.pid = publications.pid) ON authors.aid = writes.aid) WHERE publications.year < "
      "1940 {publications.year <= 1935}",
      *toy_catalog());
  EXPECT_NEAR(score_exact(q, *toy_catalog()), 0.5, 1e-12);
}

TEST(Softsem, ThetaOnBaseColumns) {
  auto p = testing::author_sketch();
  auto theta = ThetaTable::precompute(p, *toy_catalog());
  auto col = [](const char* q) { return *toy_catalog()->find_column(q); };
  const std::string contains = p.from.links[0].soft.conjuncts[0].key();
  const std::string at_least = p.from.links[0].soft.conjuncts[1].key();
  EXPECT_EQ(theta.lookup(contains, col("authors.name")), 1.0);
  EXPECT_EQ(theta.lookup(contains, col("publications.title")), 0.0);
  EXPECT_FALSE(theta.lookup(contains, col("authors.aid")));
  EXPECT_EQ(theta.lookup(at_least, col("publications.year")), 1.0);
  EXPECT_EQ(theta.lookup(at_least, col("authors.aid")), 0.0);
  EXPECT_EQ(theta.keys().size(), 3u);
}

TEST(Softsem, ApproximateScoreOfTheTarget) {
  auto p = testing::author_sketch();
  auto theta = ThetaTable::precompute(p, *toy_catalog());
  auto t = testing::author_truth();
  EXPECT_DOUBLE_EQ(score_completion(t, theta, *toy_catalog(), 0), 3.0);
  EXPECT_DOUBLE_EQ(score_completion(t, theta, *toy_catalog(), -0.5), 3.0 - 0.5 * 60);
  EXPECT_DOUBLE_EQ(unnormalized_weight(t, theta, *toy_catalog(), 0), std::exp(3.0));
}

TEST(Softsem, ApproximateScoreRejectsIllFormedCompletions) {
  auto p = testing::author_sketch();
  auto theta = ThetaTable::precompute(p, *toy_catalog());
  auto score = [&](const char* text) {
    return score_completion(parse_sketch(text, *toy_catalog()), theta, *toy_catalog(), 0);
  };
  const char* soft = "{(contains authors.name \".*Church.*\") AND (1900 <= publications.year <= 2020)}";
  // Projection outside the chain.
  EXPECT_EQ(score((std::string("SELECT authors.name FROM (publications ") + soft +
                   ") WHERE publications.year = 1948").c_str()),
            kNegInf);
  // Join on columns that are not a key edge.
  EXPECT_EQ(score((std::string("SELECT authors.name FROM (authors INNER-JOIN publications ON "
                               "authors.aid = publications.pid ") +
                   soft + ") WHERE publications.year = 1948")
                      .c_str()),
            kNegInf);
  // A table twice.
  EXPECT_EQ(score("SELECT authors.name FROM (authors INNER-JOIN (writes INNER-JOIN authors ON "
                  "writes.aid = authors.aid) ON authors.aid = writes.aid) WHERE authors.aid = 1"),
            kNegInf);
  EXPECT_EQ(unnormalized_weight(parse_sketch("SELECT authors.name FROM (publications)", *toy_catalog()),
                                theta, *toy_catalog(), 0),
            0.0);
}

TEST(Softsem, ThetaJsonAndCache) {
  auto p = testing::author_sketch();
  auto theta = ThetaTable::precompute(p, *toy_catalog());
  auto back = ThetaTable::from_json(theta.to_json(), toy_catalog()->column_count());
  EXPECT_EQ(back, theta);
  auto dir = std::filesystem::temp_directory_path() / "sqlsketch_theta_cache";
  std::filesystem::remove_all(dir);
  auto first = ThetaTable::cached(p, *toy_catalog(), dir);
  EXPECT_EQ(first, theta);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    (void)e;
    ++files;
  }
  EXPECT_EQ(files, 1u);
  EXPECT_EQ(ThetaTable::cached(p, *toy_catalog(), dir), theta);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace sqlsketch
