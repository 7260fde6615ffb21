#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "liftcomp/bounds.hpp"
#include "liftcomp/eacp.hpp"
#include "liftcomp/error.hpp"
#include "liftcomp/inference.hpp"
#include "liftcomp/model_io.hpp"
#include "oracles.hpp"

using namespace liftcomp;

TEST(Bounds, ClosedForms) {
  EXPECT_NEAR(bound_general(10, Epsilon{0.01}), 10 * std::log(1.01 / 0.99), 1e-15);
  EXPECT_NEAR(bound_general(10, Epsilon{0.01}), 0.20000667, 1e-8);
  EXPECT_EQ(bound_general(7, Epsilon{}), 0.0);
  EXPECT_NEAR(bound_tight(2, Epsilon{0.1}), 2 * std::log(1.1), 1e-15);
  EXPECT_NEAR(bound_tight(2, Epsilon{0.1}), 0.19062, 1e-5);
  EXPECT_NEAR(bound_tight(1, Epsilon{0.3}), 0.0, 1e-15);
  EXPECT_THROW(bound_tight(0, Epsilon{0.1}), ModelError);
  const auto b = bound_set(4, Epsilon{0.1});
  EXPECT_NEAR(b.alpha1, 1.025 / 1.1, 1e-15);
  EXPECT_NEAR(b.alpha2, 1.075, 1e-15);
  EXPECT_NEAR(b.d_tight, 4 * std::log(b.alpha2 / b.alpha1), 1e-12);
}

TEST(Bounds, OrderingAndMonotonicity) {
  for (std::size_t m : {1, 2, 3, 10, 100, 1000}) {
    for (double e : {0.001, 0.01, 0.1, 0.5, 0.9}) {
      const Epsilon eps{e};
      const double chain = 2.0 * static_cast<double>(m) * std::log1p(e);
      if (m > 1) EXPECT_LT(bound_tight(m, eps), chain);
      EXPECT_LT(chain, bound_general(m, eps));
      EXPECT_LT(bound_general(m, eps), bound_general(m + 1, eps));
      EXPECT_LT(bound_general(m, eps), bound_general(m, Epsilon{e * 1.01}));
      const auto b = bound_set(m, eps);
      EXPECT_LE(b.alpha1, 1.0);
      EXPECT_GE(b.alpha2, 1.0);
    }
  }
  EXPECT_TRUE(std::isfinite(bound_general(1000000, Epsilon{0.5})));
}

TEST(Envelopes, ClosedForms) {
  const auto p = prob_envelope(0.5, std::log(2.0));
  EXPECT_NEAR(p.first, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(p.second, 2.0 / 3.0, 1e-15);
  const auto z = prob_envelope(0.3, 0.0);
  EXPECT_DOUBLE_EQ(z.first, 0.3);
  EXPECT_DOUBLE_EQ(z.second, 0.3);
  EXPECT_THROW(prob_envelope(1.0, 0.1), ModelError);
  EXPECT_THROW(prob_envelope(0.5, -0.1), ModelError);
  const auto c = corollary_envelopes(1, Epsilon{});
  EXPECT_EQ(c.general, (Interval{1.0, 1.0}));
  EXPECT_EQ(c.tight, (Interval{1.0, 1.0}));
  for (std::size_t m : {2, 5, 10}) {
    for (double e : {0.001, 0.01, 0.1}) {
      const auto env = corollary_envelopes(m, Epsilon{e});
      EXPECT_GT(env.tight.first, env.general.first);
      EXPECT_LT(env.tight.second, env.general.second);
      EXPECT_NEAR(env.general.first, std::pow((1 - e) / (1 + e), m), 1e-12);
    }
  }
  const auto narrow = corollary_envelopes(10, Epsilon{0.001});
  EXPECT_GT(narrow.general.first, 0.98);
  EXPECT_LT(narrow.general.second, 1.021);
}

TEST(WorstCase, TableLayout) {
  const auto fg = worst_case_fg(2, Epsilon{0.1});
  EXPECT_EQ(fg.factors()[0].table(), (std::vector<double>{1.1, 2, 3, 4 * 1.1}));
  EXPECT_EQ(fg.factors()[1].table(), (std::vector<double>{1, 2 * 1.1, 3 * 1.1, 4}));
  EXPECT_THROW(worst_case_fg(1, Epsilon{0.1}), ModelError);
}

TEST(WorstCase, AttainsTheTightBound) {
  for (std::size_t m : {2, 3, 4}) {
    for (double e : {0.01, 0.1}) {
      const auto fg = worst_case_fg(m, Epsilon{e});
      const auto r = run_eacp(fg, Epsilon{e});
      ASSERT_EQ(r.grouping.groups.size(), 1u);
      EXPECT_NEAR(distance_exact(fg, r.m_prime).d_exact, bound_tight(m, Epsilon{e}), 1e-9);
    }
  }
}

TEST(Distance, MatchesOracleAndIsAMetric) {
  std::mt19937_64 rng(61);
  for (int rep = 0; rep < 60; ++rep) {
    const auto a = oracle::random_fg(rng, {5, 5, 3, 3});
    auto perturbed = [&](const FactorGraph& g) {
      std::vector<std::vector<double>> t;
      for (const auto& f : g.factors()) {
        auto x = f.table();
        for (double& v : x) v *= std::uniform_real_distribution<double>(0.8, 1.2)(rng);
        t.push_back(x);
      }
      return g.with_tables(t);
    };
    const auto b = perturbed(a), c = perturbed(a);
    const double ab = distance_exact(a, b).d_exact;
    EXPECT_NEAR(ab, oracle::distance(a, b), 1e-12);
    EXPECT_EQ(distance_exact(a, a).d_exact, 0.0);
    EXPECT_NEAR(ab, distance_exact(b, a).d_exact, 1e-12);
    EXPECT_LE(distance_exact(a, c).d_exact, ab + distance_exact(b, c).d_exact + 1e-9);
    const auto seq = distance_exact(a, b, 1);
    const auto par = distance_exact(a, b, 4);
    EXPECT_EQ(seq.d_exact, par.d_exact);
    EXPECT_EQ(seq.argmax_assignment, par.argmax_assignment);
    EXPECT_EQ(seq.argmin_assignment, par.argmin_assignment);
    EXPECT_NEAR(std::log(seq.max_ratio) - std::log(seq.min_ratio), seq.d_exact, 1e-12);
  }
}

TEST(Distance, IndependentOfRvOrderAndScale) {
  const auto fg = load_fg_file(LIFTCOMP_TEST_DATA "/revenue.json");
  auto scaled = fg.factors()[0].table();
  for (double& v : scaled) v *= 3.0;
  EXPECT_NEAR(distance_exact(fg, fg.with_tables({scaled, fg.factors()[1].table()})).d_exact, 0.0, 1e-12);
  const auto m_prime = run_eacp(fg, Epsilon{0.1}).m_prime;
  EXPECT_NEAR(distance_exact(fg, canonical_order(m_prime)).d_exact, distance_exact(fg, m_prime).d_exact, 1e-15);
  FactorGraph other({{"X", {"a", "b"}}}, {});
  EXPECT_THROW(distance_exact(fg, other), ModelError);
}

TEST(Distance, WorkedExamplePairRespectsBoundsAndEnvelope) {
  const auto fg = load_fg_file(LIFTCOMP_TEST_DATA "/revenue.json");
  const auto m_prime = run_eacp(fg, Epsilon{0.1}).m_prime;
  const double d = distance_exact(fg, m_prime).d_exact;
  EXPECT_NEAR(d, oracle::distance(fg, m_prime), 1e-12);
  EXPECT_LE(d, bound_tight(2, Epsilon{0.1}));
  const Query q{"SalA", {{"Rev", "high"}}, "high"};
  const double p = query_enumerate(fg, q).probability("high");
  const double pp = query_enumerate(m_prime, q).probability("high");
  const auto env = prob_envelope(p, d);
  EXPECT_GE(pp, env.first);
  EXPECT_LE(pp, env.second);
}

TEST(Distance, BoundPropertiesOnRandomModels) {
  std::mt19937_64 rng(62);
  for (int rep = 0; rep < 100; ++rep) {
    const double e = std::uniform_real_distribution<double>(0.001, 0.2)(rng);
    const auto fg = oracle::random_grouped_fg(rng, 8, 8, e / 2);
    const auto r = run_eacp(fg, Epsilon{e});
    EXPECT_LE(distance_exact(fg, r.m_prime).d_exact, bound_tight(fg.num_factors(), Epsilon{e}) + 1e-9);
    std::vector<std::vector<double>> t;
    for (const auto& f : fg.factors()) {
      auto x = f.table();
      for (double& v : x) v *= std::uniform_real_distribution<double>(1 - e, 1 + e)(rng);
      t.push_back(x);
    }
    EXPECT_LE(distance_exact(fg, fg.with_tables(t)).d_exact, bound_general(fg.num_factors(), Epsilon{e}) + 1e-9);
  }
}
