#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

#include "oracles.hpp"
#include "rmdo/evaluation.hpp"
#include "rmdo/regret.hpp"
#include "tiny_games.hpp"

using namespace rmdo;
using oracle::game;

namespace {

std::vector<double> rm(std::vector<double> r) { return regret_matching(std::span<const double>(r)); }

// Own reach of the first member of each infostate under `pi`.
double own_reach(const GameTree& g, const TabularPolicy& pi, InfosetId s) {
  const Player p = g.infoset_info(s).player;
  double r = 1.0;
  for (auto [t, a] : own_sequence(g, g.infoset_info(s).members.front(), p)) r *= pi.prob(t, a);
  return r;
}

}  // namespace

TEST(RegretMatching, PositivePartNormalization) {
  EXPECT_EQ(rm({2, -1, 0}), (std::vector<double>{1, 0, 0}));
  EXPECT_EQ(rm({3, 1}), (std::vector<double>{0.75, 0.25}));
}

TEST(RegretMatching, AllNonPositiveIsUniform) {
  EXPECT_EQ(rm({-3, -1}), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(rm({0, 0, 0, 0}), (std::vector<double>{0.25, 0.25, 0.25, 0.25}));
  EXPECT_EQ(rm({0, -2, 0}), (std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}));
}

TEST(RegretMatching, EmptyIsAContractError) { EXPECT_THROW(rm({}), ContractError); }

TEST(RegretMatching, OutputIsADistribution) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> r(1 + k % 6);
    for (auto& x : r) x = n(rng);
    const auto p = rm(r);
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      EXPECT_GE(p[i], 0.0);
      if (r[i] <= 0.0 && std::any_of(r.begin(), r.end(), [](double x) { return x > 0; })) EXPECT_EQ(p[i], 0.0);
      s += p[i];
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Weights, UniformAndLinear) {
  EXPECT_EQ(iteration_weight(WeightScheme::Uniform, 7), 1.0);
  EXPECT_EQ(iteration_weight(WeightScheme::Linear, 7), 7.0);
  EXPECT_THROW(iteration_weight(WeightScheme::Linear, 0), ContractError);
}

TEST(Cfr, OneShotRegretsMatchHandArithmetic) {
  const GameTree g = build_tree(tiny::OneShot{{1.0, 0.0}}, "oneshot");
  const GameView v = GameView::full(g);
  auto t = ProfileTables::zeros(g);
  NodeCounter c;
  cfr_iteration(v, t, 1.0, c);
  // uniform play is worth 0.5; action 0 gains 0.5, action 1 loses 0.5
  EXPECT_DOUBLE_EQ(t.regrets[0], 0.5);
  EXPECT_DOUBLE_EQ(t.regrets[1], -0.5);
  EXPECT_DOUBLE_EQ(t.strategy_sum[0], 0.5);
  EXPECT_DOUBLE_EQ(t.current[0], 1.0);
  EXPECT_DOUBLE_EQ(t.current[1], 0.0);
}

TEST(Cfr, WeightScalesRegretsAndAccumulator) {
  const GameTree g = build_tree(tiny::OneShot{{1.0, 0.0}}, "oneshot");
  const GameView v = GameView::full(g);
  auto t = ProfileTables::zeros(g);
  NodeCounter c;
  cfr_iteration(v, t, 3.0, c);
  EXPECT_DOUBLE_EQ(t.regrets[0], 1.5);
  EXPECT_DOUBLE_EQ(t.strategy_sum[1], 1.5);
  EXPECT_THROW(cfr_iteration(v, t, 0.5, c), ContractError);
}

TEST(Cfr, KuhnFirstIterationCounts58PerSweep) {
  const GameTree g = game("kuhn");
  const GameView v = GameView::full(g);
  auto t = ProfileTables::zeros(g);
  NodeCounter c;
  cfr_iteration(v, t, 1.0, c);
  EXPECT_EQ(c, (NodeCounter{2 * 58, 0, 0}));
}

TEST(Cfr, KuhnFirstIterationAccumulatesOwnReachTimesUniform) {
  const GameTree g = game("kuhn");
  const GameView v = GameView::full(g);
  auto t = ProfileTables::zeros(g);
  NodeCounter c;
  cfr_iteration(v, t, 1.0, c);
  const TabularPolicy u = TabularPolicy::uniform(g);
  for (InfosetId s = 0; s < static_cast<InfosetId>(g.num_infosets()); ++s) {
    const auto& info = g.infoset_info(s);
    for (int a = 0; a < info.num_actions; ++a)
      EXPECT_DOUBLE_EQ(t.strategy_sum[info.action_offset + a], own_reach(g, u, s) / info.num_actions) << info.key;
  }
  // Regret matching leaves uniform play wherever no regret became positive.
  for (InfosetId s = 0; s < static_cast<InfosetId>(g.num_infosets()); ++s) {
    const auto& info = g.infoset_info(s);
    bool any_pos = false;
    for (int a = 0; a < info.num_actions; ++a) any_pos |= t.regrets[info.action_offset + a] > 0;
    if (!any_pos)
      for (int a = 0; a < info.num_actions; ++a) EXPECT_DOUBLE_EQ(t.current[info.action_offset + a], 0.5);
  }
}

TEST(Cfr, AverageMatchesIndependentReaccumulation) {
  const GameTree g = game("kuhn");
  const GameView v = GameView::full(g);
  auto t = ProfileTables::zeros(g);
  NodeCounter c;
  std::vector<double> acc(g.total_actions(), 0.0);
  for (int it = 0; it < 50; ++it) {
    // Each player accumulates the policy regret matching gave it before the
    // iteration (P2's regrets are untouched by P1's sweep).
    ProfileTables before = t;
    refresh_policies(v, before);
    const TabularPolicy played = current_policy(v, before);
    cfr_iteration(v, t, 1.0, c);
    for (InfosetId s = 0; s < static_cast<InfosetId>(g.num_infosets()); ++s) {
      const auto& info = g.infoset_info(s);
      const double r = own_reach(g, played, s);
      for (int a = 0; a < info.num_actions; ++a) acc[info.action_offset + a] += r * played.prob(s, a);
    }
  }
  const auto avg = average_policy(v.population(), t.strategy_sum).policy;
  const auto ref = average_policy(v.population(), acc).policy;
  for (std::size_t i = 0; i < acc.size(); ++i) EXPECT_NEAR(avg.data()[i], ref.data()[i], 1e-12);
}

TEST(Cfr, KuhnConvergesToAnalyticValue) {
  const GameTree g = game("kuhn");
  const GameView v = GameView::full(g);
  auto t = ProfileTables::zeros(g);
  NodeCounter c;
  for (int it = 0; it < 3000; ++it) cfr_iteration(v, t, 1.0, c);
  const auto avg = average_policy(v.population(), t.strategy_sum).policy;
  EXPECT_NEAR(oracle::value_p1(g, avg), -1.0 / 18.0, 1e-3);
  EXPECT_LT(exploitability(v, avg), 5e-3);
}

TEST(AveragePolicy, NormalizationAndUnreachedFlag) {
  const GameTree g = build_tree(tiny::Pennies{}, "pennies");
  const Population pop = Population::full(g);
  const auto r = average_policy(pop, std::vector<double>{2, 2, 0, 0});
  EXPECT_DOUBLE_EQ(r.policy.prob(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(r.policy.prob(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(r.policy.prob(1, 0), 0.5);
  ASSERT_EQ(r.unreached.size(), 1u);
  EXPECT_EQ(r.unreached[0], 1);
}

TEST(AveragePolicy, RestrictedToPopulation) {
  const GameTree g = build_tree(tiny::Pennies{}, "pennies");
  Population pop = Population::empty(g);
  pop.add(0, 1);
  pop.add(1, 0);
  const auto r = average_policy(pop, std::vector<double>{5, 1, 1, 3});
  EXPECT_EQ(r.policy.prob(0, 0), 0.0);
  EXPECT_EQ(r.policy.prob(0, 1), 1.0);
  EXPECT_EQ(r.policy.prob(1, 0), 1.0);
  EXPECT_TRUE(r.unreached.empty());
}

TEST(Mccfr, ExploreOneSamplesUniformly) {
  const GameTree g = build_tree(tiny::OneShot{{1.0, 2.0}}, "oneshot");
  const GameView v = GameView::full(g);
  for (double explore : {1.0, 0.6}) {
    int picks0 = 0;
    const int n = 40000;
    Rng rng(11);
    NodeCounter c;
    OsObserver obs = [&](const OsUpdate& u) { picks0 += u.action_cf_values[0] != 0.0; };
    for (int k = 0; k < n; ++k) {
      auto t = ProfileTables::zeros(g);
      t.regrets[0] = 100.0;  // current policy is pure on action 0
      mccfr_episode(v, t, SamplerParams(explore), rng, c, 1.0, &obs);
    }
    const double expect = explore == 1.0 ? 0.5 : 0.4 + 0.3;
    const double se = std::sqrt(expect * (1 - expect) / n);
    EXPECT_NEAR(static_cast<double>(picks0) / n, expect, 4 * se) << "explore " << explore;
  }
}

TEST(Mccfr, TrajectoryLengthIsBounded) {
  const GameTree g = game("kuhn");
  const GameView v = GameView::full(g);
  auto t = ProfileTables::zeros(g);
  Rng rng(3);
  for (int k = 0; k < 2000; ++k) {
    NodeCounter c;
    mccfr_episode(v, t, SamplerParams(0.6), rng, c);
    // two trajectories, each: 2 deals + 2..3 decisions + terminal
    EXPECT_GE(c.regret_min, 10u);
    EXPECT_LE(c.regret_min, 12u);
    EXPECT_EQ(c.best_response + c.evaluation, 0u);
  }
}

TEST(Mccfr, EstimatorIsUnbiasedAtRootInfostates) {
  const GameTree g = game("kuhn");
  const GameView v = GameView::full(g);
  const TabularPolicy uniform = TabularPolicy::uniform(g);
  const auto roots = std::vector<InfosetId>{g.find_infoset("1:0|"), g.find_infoset("1:1|"), g.find_infoset("1:2|")};
  const int n = 100000;
  std::map<InfosetId, double> sum, sq;
  double total_sum = 0.0, total_sq = 0.0;
  Rng rng(2024);
  NodeCounter c;
  for (int k = 0; k < n; ++k) {
    auto t = ProfileTables::zeros(g);
    std::map<InfosetId, double> x;
    OsObserver obs = [&](const OsUpdate& u) {
      if (u.player == Player::P1) x[u.infoset] += u.cf_value;
    };
    mccfr_episode(v, t, SamplerParams(0.6), rng, c, 1.0, &obs);
    double tot = 0.0;
    for (InfosetId s : roots) {
      sum[s] += x[s];
      sq[s] += x[s] * x[s];
      tot += x[s];
    }
    total_sum += tot;
    total_sq += tot * tot;
  }
  auto check = [&](double s, double q, double exact, const std::string& what) {
    const double mean = s / n;
    const double se = std::sqrt((q / n - mean * mean) / (n - 1));
    EXPECT_NEAR(mean, exact, 3 * se) << what;
  };
  for (InfosetId s : roots)
    check(sum[s], sq[s], oracle::counterfactual_value(g, uniform, s), g.infoset_info(s).key);
  check(total_sum, total_sq, oracle::value_p1(g, uniform), "root");
}

TEST(Mccfr, RejectsBadExplore) {
  EXPECT_THROW(SamplerParams(0.0), ContractError);
  EXPECT_THROW(SamplerParams(1.5), ContractError);
}
