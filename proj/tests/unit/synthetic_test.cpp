#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <set>

#include "sqlsketch/eval.hpp"
#include "sqlsketch/lang.hpp"
#include "sqlsketch/model.hpp"
#include "sqlsketch/refine.hpp"
#include "sqlsketch/synthetic.hpp"

namespace sqlsketch {
namespace {

namespace fs = std::filesystem;

TEST(Synthetic, DeterministicInSeed) {
  auto a = generate_case(11);
  auto b = generate_case(11);
  EXPECT_EQ(*a.catalog, *b.catalog);
  EXPECT_EQ(a.sketch, b.sketch);
  EXPECT_EQ(a.truth, b.truth);
  EXPECT_NE(print_sketch(generate_case(12).truth), print_sketch(a.truth));
}

TEST(Synthetic, ShapeOfGeneratedCases) {
  SyntheticOptions opts;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto c = generate_case(seed, opts);
    const auto& cat = *c.catalog;
    EXPECT_GE(cat.table_count(), opts.min_tables);
    EXPECT_LE(cat.table_count(), opts.max_tables);
    // A key tree: one edge per non-root table.
    EXPECT_EQ(cat.join_graph().size(), cat.table_count() - 1);
    EXPECT_LE(c.truth.from.links.size(), opts.max_chain);
    EXPECT_TRUE(matches(c.sketch, c.truth));
    // One soft constraint group per column hole.
    std::set<std::string> soft_holes;
    for (const auto& p : c.sketch.from.links[0].soft.conjuncts)
      soft_holes.insert(std::get<Hole>(p.column).name);
    std::set<std::string> col_holes;
    for (const auto& h : holes(c.sketch))
      if (h.kind == HoleKind::Column) col_holes.insert(h.name);
    EXPECT_EQ(soft_holes, col_holes);
    EXPECT_NO_THROW(evaluate(c.truth, cat));
  }
}

TEST(Synthetic, SuiteOnDiskLoadsBack) {
  auto dir = fs::temp_directory_path() / "sqlsketch_suite_test";
  fs::remove_all(dir);
  auto entries = write_suite(dir, 3, 5);
  ASSERT_EQ(entries.size(), 3u);
  auto read = read_manifest(dir / "manifest.json");
  ASSERT_EQ(read.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    Catalog c = Catalog::load(read[i].schema, read[i].data);
    auto fresh = generate_case(splitmix64(5 + i));
    EXPECT_EQ(c, *fresh.catalog);
    std::ifstream in(read[i].sketch);
    std::stringstream text;
    text << in.rdbuf();
    EXPECT_EQ(parse_sketch(text.str(), c), fresh.sketch);
  }
  fs::remove_all(dir);
}

}  // namespace
}  // namespace sqlsketch
