#include <gtest/gtest.h>

#include <random>

#include "liftcomp/acp.hpp"
#include "liftcomp/model_io.hpp"
#include "oracles.hpp"

using namespace liftcomp;

namespace {

FactorGraph load(const char* name) { return load_fg_file(std::string(LIFTCOMP_TEST_DATA "/") + name); }

FactorGraph with_equal_tables(const FactorGraph& fg) {
  // phi2 takes phi1's table, rearranged into phi2's own argument order.
  const auto align = Alignment{{fg.factors()[1].args()[0] == "Rev" ? std::size_t{1} : 0,
                                fg.factors()[1].args()[0] == "Rev" ? std::size_t{0} : 1}};
  auto t2 = from_reference_frame(fg.factors()[0].table(), align, fg.factors()[0].shape(), fg.factors()[1].shape());
  return fg.with_tables({fg.factors()[0].table(), t2});
}

std::vector<std::vector<std::string>> class_names(const FactorGraph& fg, const ColourPassResult& r) {
  std::vector<std::vector<std::string>> out;
  for (const auto& c : r.rv_classes) {
    std::vector<std::string> names;
    for (std::size_t i : c) names.push_back(fg.rvs()[i].name);
    out.push_back(names);
  }
  return out;
}

}  // namespace

TEST(Acp, IdenticalFactorsAndSymmetricRvsAreGrouped) {
  const auto fg = with_equal_tables(load("revenue.json"));
  const auto r = run_acp(fg);
  EXPECT_EQ(r.colours.factor_groups.member_sets(), (std::vector<std::vector<std::size_t>>{{0, 1}}));
  EXPECT_EQ(class_names(fg, r.colours), (std::vector<std::vector<std::string>>{{"SalA", "SalB"}, {"Rev"}}));
  ASSERT_EQ(r.pfg.parfactors.size(), 1u);
  EXPECT_EQ(r.pfg.parfactors[0].count(), 2u);
}

TEST(Acp, DistinctTablesStaySeparate) {
  const auto fg = load("revenue.json");
  const auto r = run_acp(fg);
  EXPECT_EQ(r.colours.factor_groups.groups.size(), 2u);
  EXPECT_EQ(r.colours.rv_classes.size(), 3u);
}

TEST(Acp, ArgumentOrderIsRearranged) {
  const auto fg = with_equal_tables(load("revenue_permuted.json"));
  const auto r = run_acp(fg);
  ASSERT_EQ(r.colours.factor_groups.groups.size(), 1u);
  EXPECT_EQ(r.colours.factor_groups.groups[0].members[1].alignment.perm, (std::vector<std::size_t>{1, 0}));
  EXPECT_EQ(class_names(fg, r.colours), (std::vector<std::vector<std::string>>{{"SalA", "SalB"}, {"Rev"}}));
}

TEST(Acp, EvidenceBreaksSymmetry) {
  const auto fg = with_equal_tables(load("revenue.json"));
  const auto r = run_acp(fg, {{"SalA", "high"}});
  EXPECT_EQ(r.colours.factor_groups.groups.size(), 2u);
  EXPECT_EQ(r.colours.rv_classes.size(), 3u);
  const auto both = run_acp(fg, {{"SalA", "high"}, {"SalB", "high"}});
  EXPECT_EQ(both.colours.factor_groups.groups.size(), 1u);
}

TEST(Acp, CommutativeArgumentsShareAClass) {
  const auto fg = load("commutative.json");
  const auto with = run_acp(fg);
  EXPECT_EQ(class_names(fg, with.colours), (std::vector<std::vector<std::string>>{{"ComA", "ComB"}, {"Rev"}}));
  AcpOptions off;
  off.detect_commutative = false;
  EXPECT_EQ(run_acp(fg, {}, off).colours.rv_classes.size(), 3u);
}

TEST(Acp, FinalPartitionIsStable) {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 50; ++rep) {
    const auto fg = oracle::random_grouped_fg(rng, 6, 8, 0.0);
    const auto init = exact_factor_colouring(fg);
    const auto r = colour_pass(fg, init, {});
    FactorColouring again = init;
    again.colours = r.state.factor_colours;
    const auto r2 = colour_pass(fg, again, {});
    EXPECT_EQ(r2.factor_groups.member_sets(), r.factor_groups.member_sets());
    EXPECT_EQ(r2.rv_classes, r.rv_classes);
    // grouped factors share their table once aligned
    for (const auto& g : r.factor_groups.groups) {
      const auto tables = aligned_tables(fg.factors(), g);
      for (const auto& t : tables) EXPECT_EQ(t, tables.front());
    }
  }
}

TEST(ExactColouring, PermutedCopiesShareAColour) {
  std::mt19937_64 rng(32);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<double> t(12);
    for (double& x : t) x = std::uniform_real_distribution<double>(0.1, 1)(rng);
    Factor f("f", {"A", "B", "C"}, {2, 3, 2}, t);
    Alignment a = Alignment::identity(3);
    std::shuffle(a.perm.begin(), a.perm.end(), rng);
    Shape own(3);
    for (std::size_t j = 0; j < 3; ++j) own[j] = f.shape()[a.perm[j]];
    std::vector<std::string> args(3);
    for (std::size_t j = 0; j < 3; ++j) args[j] = std::string(1, static_cast<char>('X' + a.perm[j]));
    Factor g("g", args, own, from_reference_frame(t, a, f.shape(), own));
    FactorGraph fg({{"A", {"0", "1"}}, {"B", {"0", "1", "2"}}, {"C", {"0", "1"}},
                    {"X", {"0", "1"}}, {"Y", {"0", "1", "2"}}, {"Z", {"0", "1"}}},
                   {f, g});
    const auto c = exact_factor_colouring(fg);
    EXPECT_EQ(c.colours[0], c.colours[1]);
    EXPECT_EQ(to_reference_frame(g, c.alignments[1], f.shape()), t);
  }
}

TEST(RemapCommutative, FollowsAlignment) {
  const CommutativeSpec frame{{{0}, {1, 2}}};
  // member position 0 is frame position 2, 1 is 0, 2 is 1
  const auto m = remap_commutative(frame, Alignment{{2, 0, 1}});
  EXPECT_EQ(m.blocks, (std::vector<std::vector<std::size_t>>{{0, 2}, {1}}));
}
