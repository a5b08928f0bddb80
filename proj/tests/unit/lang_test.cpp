#include <gtest/gtest.h>

#include "sqlsketch/error.hpp"
#include "sqlsketch/lang.hpp"
#include "sqlsketch/refine.hpp"
#include "sqlsketch/synthetic.hpp"
#include "support.hpp"

namespace sqlsketch {
namespace {

using testing::toy_catalog;

Errc parse_error(const std::string& text) {
  try {
    parse_sketch(text, *toy_catalog());
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "parsed: " << text;
  return Errc::Io;
}

TEST(Lang, AuthorSketchStructure) {
  SketchAst p = testing::author_sketch();
  ASSERT_EQ(p.projection.size(), 1u);
  EXPECT_EQ(std::get<Hole>(p.projection[0]), (Hole{"c_name", HoleKind::Column}));
  ASSERT_EQ(p.from.links.size(), 1u);
  EXPECT_EQ(std::get<Hole>(p.from.links[0].source), (Hole{"t", HoleKind::Table}));
  const auto& soft = p.from.links[0].soft.conjuncts;
  ASSERT_EQ(soft.size(), 3u);
  EXPECT_EQ(soft[0].op, SoftOp::Contains);
  EXPECT_EQ(soft[1].op, SoftOp::AtLeast);
  EXPECT_EQ(soft[1].value, Value(std::int64_t{1900}));
  EXPECT_EQ(soft[2].op, SoftOp::AtMost);
  EXPECT_EQ(soft[2].value, Value(std::int64_t{2020}));
  EXPECT_EQ(p.where.kind, Predicate::Kind::Compare);
  EXPECT_EQ(p.where.comparison.op, RelOp::Eq);
}

TEST(Lang, TruthChainIsThreeLinks) {
  SketchAst q = testing::author_truth();
  ASSERT_EQ(q.from.links.size(), 3u);
  ASSERT_EQ(q.from.joins.size(), 2u);
  EXPECT_EQ(std::get<std::string>(q.from.links[0].source), "authors");
  EXPECT_EQ(std::get<std::string>(q.from.links[2].source), "publications");
  EXPECT_EQ(std::get<ColumnRef>(q.from.joins[0].left), (ColumnRef{"authors", "aid"}));
  EXPECT_EQ(std::get<ColumnRef>(q.from.joins[1].right), (ColumnRef{"publications", "pid"}));
  // The soft block written after the outer ON belongs to the chain head.
  EXPECT_EQ(q.from.links[0].soft.conjuncts.size(), 3u);
}

TEST(Lang, PrintParseRoundTrip) {
  for (const char* text : {testing::kAuthorSketch, testing::kAuthorTruth, testing::kThreeWayJoin}) {
    SketchAst p = parse_sketch(text, *toy_catalog());
    EXPECT_EQ(parse_sketch(print_sketch(p), *toy_catalog()), p) << print_sketch(p);
  }
}

TEST(Lang, RoundTripOnGeneratedSketches) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto c = generate_case(seed);
    EXPECT_EQ(parse_sketch(print_sketch(c.sketch), *c.catalog), c.sketch);
    EXPECT_EQ(parse_sketch(print_sketch(c.truth), *c.catalog), c.truth);
  }
}

TEST(Lang, SoftFormsAndOperators) {
  const char* text =
      "(SELECT name FROM (authors {(\"x\" in authors.name) AND (authors.aid ~= 1) AND "
      "(authors.name ~= r\"A.*\") AND contains(name, \"Al\")}) WHERE aid >= 0 AND (aid < 5 OR "
      "aid > 9) {authors.aid <= 3}) {authors.aid >= 1}";
  SketchAst p = parse_sketch(text, *toy_catalog());
  const auto& soft = p.from.links[0].soft.conjuncts;
  ASSERT_EQ(soft.size(), 4u);
  EXPECT_EQ(soft[0].op, SoftOp::Member);
  EXPECT_EQ(soft[1].op, SoftOp::About);
  EXPECT_FALSE(soft[1].regex);
  EXPECT_EQ(soft[2].op, SoftOp::About);
  EXPECT_TRUE(soft[2].regex);
  EXPECT_EQ(soft[3].op, SoftOp::Contains);
  EXPECT_EQ(p.select_soft.conjuncts.size(), 1u);
  EXPECT_EQ(p.query_soft.conjuncts.size(), 1u);
  EXPECT_EQ(p.where.kind, Predicate::Kind::And);
  EXPECT_EQ(p.where.operands[1].kind, Predicate::Kind::Or);
  EXPECT_EQ(parse_sketch(print_sketch(p), *toy_catalog()), p);
}

TEST(Lang, KeywordsCaseInsensitiveAndComments) {
  SketchAst a = parse_sketch("select name from (authors) -- note\n where aid = 1", *toy_catalog());
  SketchAst b = parse_sketch("SELECT authors.name FROM (authors) WHERE authors.aid = 1", *toy_catalog());
  EXPECT_EQ(a, b);
}

TEST(Lang, LiteralOnLeftIsMirrored) {
  SketchAst a = parse_sketch("SELECT name FROM (authors) WHERE 1 < aid", *toy_catalog());
  SketchAst b = parse_sketch("SELECT name FROM (authors) WHERE aid > 1", *toy_catalog());
  EXPECT_EQ(a, b);
}

TEST(Lang, InnerJoinSpelledWithSpace) {
  SketchAst a = parse_sketch(
      "SELECT name FROM (authors INNER JOIN writes ON authors.aid = writes.aid)", *toy_catalog());
  EXPECT_EQ(a.from.links.size(), 2u);
}

TEST(Lang, SyntaxErrorCarriesLocation) {
  try {
    parse_sketch("SELECT name\nFROM (authors WHERE", *toy_catalog());
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.code(), Errc::SyntaxError);
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GT(e.column(), 1u);
  }
}

TEST(Lang, Errors) {
  EXPECT_EQ(parse_error("SELECT nope FROM (authors)"), Errc::UnknownColumnConstant);
  EXPECT_EQ(parse_error("SELECT aid FROM (??t:table)"), Errc::UnknownColumnConstant);  // ambiguous
  EXPECT_EQ(parse_error("SELECT aid FROM (authors INNER-JOIN writes ON authors.aid = writes.aid)"),
            Errc::UnknownColumnConstant);
  EXPECT_EQ(print_sketch(parse_sketch("SELECT aid FROM (authors)", *toy_catalog())),
            "SELECT authors.aid\nFROM (authors)");
  EXPECT_EQ(parse_error("SELECT name FROM (nope)"), Errc::UnknownTable);
  EXPECT_EQ(parse_error("SELECT ??x:column FROM (??x:table)"), Errc::HoleKindConflict);
  EXPECT_EQ(parse_error("SELECT ??x:table FROM (authors)"), Errc::HoleAtForbiddenPosition);
  EXPECT_EQ(parse_error("SELECT name FROM (??t:table INNER-JOIN writes ON ??a:column = ??b:column)"),
            Errc::HoleAtForbiddenPosition);
  EXPECT_EQ(parse_error("SELECT name FROM (authors) WHERE"), Errc::SyntaxError);
}

TEST(Lang, PrinterQualifiesAndSugarsRanges) {
  std::string text = print_sketch(testing::author_truth());
  EXPECT_NE(text.find("(1900 <= publications.year <= 2020)"), std::string::npos) << text;
  EXPECT_NE(text.find("SELECT authors.name"), std::string::npos);
  EXPECT_NE(text.find("(contains authors.name \".*Church.*\")"), std::string::npos);
}

}  // namespace
}  // namespace sqlsketch
