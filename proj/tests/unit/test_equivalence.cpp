#include <gtest/gtest.h>

#include <random>

#include "liftcomp/equivalence.hpp"
#include "liftcomp/error.hpp"
#include "liftcomp/model_io.hpp"
#include "oracles.hpp"

using namespace liftcomp;

namespace {

Factor three_tables(int i) {
  static const std::vector<std::vector<double>> t{
      {0.75, 0.33, 0.48, 0.22}, {0.8, 0.3, 0.5, 0.2}, {0.84, 0.31, 0.51, 0.22}};
  return Factor("phi" + std::to_string(i + 1), {"R1", "R2"}, {2, 2}, t[i]);
}

}  // namespace

TEST(Epsilon, Domain) {
  EXPECT_NO_THROW(Epsilon(0.0));
  EXPECT_NO_THROW(Epsilon(0.999));
  EXPECT_THROW(Epsilon(1.0), ModelError);
  EXPECT_THROW(Epsilon(-0.1), ModelError);
  EXPECT_THROW(Epsilon(NAN), ModelError);
}

TEST(EpsEquivPotentials, PublishedIntervals) {
  const Epsilon e{0.1};
  // 0.75 lies outside [0.756, 0.924], 0.84 outside [0.675, 0.825].
  EXPECT_FALSE(eps_equiv_potentials(0.75, 0.84, e));
  EXPECT_TRUE(eps_equiv_potentials(0.75, 0.8, e));
  EXPECT_TRUE(eps_equiv_potentials(0.22, 0.2, e));
  EXPECT_TRUE(eps_equiv_potentials(0.2, 0.22, e));
}

TEST(EpsEquivPotentials, ZeroIsExact) {
  EXPECT_TRUE(eps_equiv_potentials(0.3, 0.3, Epsilon{}));
  EXPECT_FALSE(eps_equiv_potentials(0.3, std::nextafter(0.3, 1.0), Epsilon{}));
}

TEST(EpsEquivPotentials, SymmetricReflexiveAndMatchesOracle) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> v(0.01, 2.0), ev(0.0, 0.3);
  for (int i = 0; i < 20000; ++i) {
    const double a = v(rng), b = a * std::uniform_real_distribution<double>(0.7, 1.3)(rng), e = ev(rng);
    EXPECT_EQ(eps_equiv_potentials(a, b, Epsilon{e}), eps_equiv_potentials(b, a, Epsilon{e}));
    EXPECT_TRUE(eps_equiv_potentials(a, a, Epsilon{e}));
    EXPECT_EQ(eps_equiv_potentials(a, b, Epsilon{e}), oracle::eps_equiv(a, b, e));
  }
}

TEST(EpsEquivPotentials, PairRatioIsAtMostOnePlusEps) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> v(0.01, 2.0), ev(0.001, 0.5);
  int checked = 0;
  for (int i = 0; i < 50000; ++i) {
    const double a = v(rng), e = ev(rng);
    const double b = a * std::uniform_real_distribution<double>(1 - e, 1 + e)(rng);
    if (!eps_equiv_potentials(a, b, Epsilon{e})) continue;
    ++checked;
    EXPECT_LE(std::max(a, b) / std::min(a, b), (1 + e) * (1 + 1e-11));
    EXPECT_LT(std::max(a, b) / std::min(a, b), 1 / (1 - e));
  }
  EXPECT_GT(checked, 1000);
}

TEST(EpsEquivFactors, ThreeTablesSemantics) {
  const Epsilon e{0.1};
  EXPECT_TRUE(eps_equiv_factors(three_tables(0), three_tables(1), e).has_value());
  EXPECT_TRUE(eps_equiv_factors(three_tables(1), three_tables(2), e).has_value());
  EXPECT_FALSE(eps_equiv_factors(three_tables(0), three_tables(2), e).has_value());
}

TEST(EpsEquivFactors, FindsArgumentRearrangement) {
  const auto fg = load_fg_file(LIFTCOMP_TEST_DATA "/revenue_permuted.json");
  const auto align = eps_equiv_factors(fg.factors()[0], fg.factors()[1], Epsilon{0.1});
  ASSERT_TRUE(align);
  EXPECT_EQ(align->perm, (std::vector<std::size_t>{1, 0}));
  const auto in_frame = to_reference_frame(fg.factors()[1], *align, fg.factors()[0].shape());
  EXPECT_EQ(in_frame, (std::vector<double>{0.8, 0.3, 0.5, 0.2}));
  EXPECT_FALSE(eps_equiv_factors(fg.factors()[0], fg.factors()[1], Epsilon{0.01}));
}

TEST(EpsEquivFactors, ArityCap) {
  std::vector<std::string> args;
  for (int i = 0; i < 9; ++i) args.push_back("R" + std::to_string(i));
  Factor big("f", args, Shape(9, 2), std::vector<double>(512, 1.0));
  EXPECT_THROW(eps_equiv_factors(big, big, Epsilon{0.1}), CapExceededError);
}

TEST(Alignment, InverseAndCompose) {
  Alignment a{{2, 0, 1}}, b{{1, 2, 0}};
  EXPECT_TRUE(a.compose(a.inverse()).is_identity());
  EXPECT_TRUE(a.inverse().compose(a).is_identity());
  EXPECT_EQ(a.compose(b).perm, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_FALSE((Alignment{{0, 0}}).is_valid());
}

TEST(ReferenceFrame, RoundTripOverRandomPermutations) {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 50; ++rep) {
    Shape own{2, 3, 4};
    std::vector<double> t(24);
    for (double& x : t) x = std::uniform_real_distribution<double>(0.1, 1)(rng);
    Factor f("f", {"A", "B", "C"}, own, t);
    Alignment a = Alignment::identity(3);
    std::shuffle(a.perm.begin(), a.perm.end(), rng);
    Shape ref(3);
    for (std::size_t j = 0; j < 3; ++j) ref[a.perm[j]] = own[j];
    const auto in_ref = to_reference_frame(f, a, ref);
    // reference(r) == own(r_perm[0], r_perm[1], r_perm[2])
    std::vector<std::size_t> r(3, 0);
    std::size_t flat = 0;
    do {
      std::size_t idx = 0;
      for (std::size_t j = 0; j < 3; ++j) idx = idx * own[j] + r[a.perm[j]];
      EXPECT_EQ(in_ref[flat++], t[idx]);
    } while (next_index(r, ref));
    EXPECT_EQ(from_reference_frame(in_ref, a, ref, own), t);
  }
}

TEST(Err, PublishedPairs) {
  const auto id = Alignment::identity(2);
  EXPECT_NEAR(err(three_tables(0), three_tables(1), id), 0.0042, 1e-12);
  EXPECT_NEAR(err(three_tables(1), three_tables(2), id), 0.0022, 1e-12);
}

TEST(CommutativeBlocks, DetectsInterchangeableArguments) {
  const auto fg = load_fg_file(LIFTCOMP_TEST_DATA "/commutative.json");
  const auto spec = commutative_blocks(fg.factors()[0], Epsilon{});
  EXPECT_EQ(spec.blocks, (std::vector<std::vector<std::size_t>>{{0}, {1, 2}}));
  EXPECT_TRUE(spec.has_nontrivial());
  EXPECT_EQ(spec.block_of(2), (std::vector<std::size_t>{1, 2}));
  EXPECT_FALSE(commutative_blocks(three_tables(0), Epsilon{}).has_nontrivial());
}

TEST(CommutativeBlocks, RelaxedToleranceAcceptsNearSymmetry) {
  Factor f("f", {"A", "B"}, {2, 2}, {0.5, 0.3, 0.31, 0.2});
  EXPECT_FALSE(commutative_blocks(f, Epsilon{}).has_nontrivial());
  EXPECT_TRUE(commutative_blocks(f, Epsilon{0.05}).has_nontrivial());
}
