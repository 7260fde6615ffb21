#include <gtest/gtest.h>

#include <random>

#include "liftcomp/acp.hpp"
#include "liftcomp/error.hpp"
#include "liftcomp/model_io.hpp"
#include "liftcomp/pfg.hpp"
#include "oracles.hpp"

using namespace liftcomp;

TEST(CountingCompaction, HistogramRowsFollowFirstAppearance) {
  const auto fg = load_fg_file(LIFTCOMP_TEST_DATA "/commutative.json");
  const Factor& f = fg.factors()[0];
  const auto c = compact(f.table(), f.shape(), CommutativeSpec{{{0}, {1, 2}}});
  ASSERT_EQ(c.blocks.size(), 1u);
  EXPECT_EQ(c.blocks[0].histograms, (std::vector<std::vector<std::size_t>>{{2, 0}, {1, 1}, {0, 2}}));
  EXPECT_EQ(c.shape, (Shape{2, 3}));
  EXPECT_EQ(c.table, (std::vector<double>{0.9, 0.4, 0.2, 0.7, 0.3, 0.6}));
  EXPECT_EQ(expand(c, f.shape()), f.table());
}

TEST(CountingCompaction, CountingDimensionTakesFirstBlockPosition) {
  // args (A, Rev, B) with A and B interchangeable
  std::vector<double> t(8);
  std::vector<std::size_t> idx(3, 0);
  std::size_t flat = 0;
  do {
    t[flat++] = 1.0 + idx[0] + idx[2] + 10.0 * idx[1];
  } while (next_index(idx, Shape{2, 2, 2}));
  const auto c = compact(t, {2, 2, 2}, CommutativeSpec{{{0, 2}, {1}}});
  ASSERT_EQ(c.dims.size(), 2u);
  EXPECT_TRUE(c.dims[0].counting);
  EXPECT_FALSE(c.dims[1].counting);
  EXPECT_EQ(c.dims[1].index, 1u);
  EXPECT_EQ(c.table, (std::vector<double>{1, 11, 2, 12, 3, 13}));
  EXPECT_EQ(expand(c, {2, 2, 2}), t);
}

TEST(CountingCompaction, ThreeValuedBlockOfThree) {
  // symmetric in all three arguments with range 3: 10 histograms
  Shape s{3, 3, 3};
  std::vector<double> t;
  std::vector<std::size_t> idx(3, 0);
  do {
    std::vector<std::size_t> sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    t.push_back(1.0 + sorted[0] + 3.0 * sorted[1] + 9.0 * sorted[2]);
  } while (next_index(idx, s));
  const auto c = compact(t, s, CommutativeSpec{{{0, 1, 2}}});
  EXPECT_EQ(c.table.size(), 10u);
  EXPECT_EQ(expand(c, s), t);
}

TEST(CountingCompaction, CellsAverageNearSymmetricEntries) {
  const auto c = compact(std::vector<double>{1.0, 2.0, 4.0, 8.0}, {2, 2}, CommutativeSpec{{{0, 1}}});
  EXPECT_EQ(c.table, (std::vector<double>{1.0, 3.0, 8.0}));
}

TEST(ConstructPfg, RejectsGroupsWithDifferentTables) {
  const auto fg = load_fg_file(LIFTCOMP_TEST_DATA "/revenue.json");
  Grouping g;
  g.groups.push_back({{{0, Alignment::identity(2)}, {1, Alignment::identity(2)}}});
  EXPECT_THROW(construct_pfg(fg, g, {{0}, {1}, {2}}), ModelError);
}

TEST(Ground, ReproducesTheCompressedModel) {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 50; ++rep) {
    const auto fg = oracle::random_grouped_fg(rng, 6, 8, 0.0);
    const auto acp = run_acp(fg);
    const auto back = ground(acp.pfg);
    EXPECT_EQ(canonical_order(back), canonical_order(fg));
    EXPECT_EQ(acp.pfg.num_ground_factors(), fg.num_factors());
    EXPECT_EQ(acp.pfg.num_ground_rvs(), fg.num_rvs());
  }
}

TEST(Ground, CommutativeRoundTripPreservesDistribution) {
  const auto fg = load_fg_file(LIFTCOMP_TEST_DATA "/commutative.json");
  const auto acp = run_acp(fg);
  ASSERT_TRUE(acp.pfg.parfactors[0].crv);
  EXPECT_EQ(acp.pfg.parfactors[0].crv->table.size(), 6u);
  const auto back = canonical_order(ground(acp.pfg));
  EXPECT_EQ(back, canonical_order(fg));
}
