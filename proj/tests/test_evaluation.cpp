#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "rmdo/evaluation.hpp"
#include "tiny_games.hpp"

using namespace rmdo;
using oracle::game;

TEST(ExpectedValue, UniformKuhnMatchesRollouts) {
  const GameTree g = game("kuhn");
  const GameView v = GameView::full(g);
  const TabularPolicy u = TabularPolicy::uniform(g);
  const double exact = expected_value(v, u, Player::P1);
  EXPECT_NEAR(exact, oracle::value_p1(g, u), 1e-14);
  const auto [mean, se] = oracle::rollout_p1(g, u, 1'000'000, 99);
  EXPECT_NEAR(mean, exact, 3 * se);
}

TEST(ExpectedValue, ZeroSum) {
  std::mt19937_64 rng(5);
  for (const char* name : {"kuhn", "leduc"}) {
    const GameTree g = game(name);
    const GameView v = GameView::full(g);
    for (int k = 0; k < 5; ++k) {
      const auto pi = oracle::random_policy(g, rng);
      EXPECT_NEAR(expected_value(v, pi, Player::P1) + expected_value(v, pi, Player::P2), 0.0, 1e-12);
    }
  }
}

TEST(ExpectedValue, SingleLineGame) {
  const GameTree g = build_tree(tiny::Line{3, 1.0}, "line");
  const GameView v = GameView::full(g);
  EXPECT_EQ(expected_value(v, TabularPolicy::uniform(g), Player::P1), 1.0);
  EXPECT_EQ(exploitability(v, TabularPolicy::uniform(g)), 0.0);
}

TEST(ExpectedValue, ChargesTheEvaluationCounter) {
  const GameTree g = game("kuhn");
  const GameView v = GameView::full(g);
  NodeCounter c;
  expected_value(v, TabularPolicy::uniform(g), Player::P1, c);
  EXPECT_EQ(c.regret_min, 0u);
  EXPECT_EQ(c.best_response, 0u);
  EXPECT_GT(c.evaluation, 0u);
}

TEST(ExpectedValue, RejectsNonDistribution) {
  const GameTree g = game("kuhn");
  const GameView v = GameView::full(g);
  TabularPolicy pi = TabularPolicy::uniform(g);
  pi.at(0)[0] = 0.9;
  EXPECT_THROW(expected_value(v, pi, Player::P1), ContractError);
}

TEST(BestResponse, MatchesPureStrategyEnumeration) {
  const GameTree g = game("kuhn");
  const GameView v = GameView::full(g);
  std::mt19937_64 rng(17);
  NodeCounter c;
  for (int k = 0; k < 50; ++k) {
    const auto opp = k == 0 ? TabularPolicy::uniform(g) : oracle::random_policy(g, rng);
    for (Player p : kDecisionPlayers) {
      const auto br = best_response(v, opp, p, c);
      EXPECT_NEAR(br.value, oracle::brute_force_br(g, opp, p), 1e-10);
      // The returned pure policy achieves the reported value.
      TabularPolicy mixed = opp;
      for (InfosetId s : g.infosets_of(p))
        for (int a = 0; a < g.infoset_info(s).num_actions; ++a) mixed.at(s)[a] = br.policy.prob(s, a);
      const double sign = p == Player::P1 ? 1.0 : -1.0;
      EXPECT_NEAR(sign * oracle::value_p1(g, mixed), br.value, 1e-10);
    }
  }
}

TEST(BestResponse, DominatesTheProfileValue) {
  const GameTree g = game("leduc");
  const GameView v = GameView::full(g);
  std::mt19937_64 rng(3);
  NodeCounter c;
  for (int k = 0; k < 3; ++k) {
    const auto pi = oracle::random_policy(g, rng);
    for (Player p : kDecisionPlayers)
      EXPECT_GE(best_response(v, pi, p, c).value, expected_value(v, pi, p) - 1e-12);
  }
}

TEST(BestResponse, NoDecisionsMeansExpectedValue) {
  const GameTree g = build_tree(tiny::OneShot{{1.0, 3.0}}, "oneshot");
  const GameView v = GameView::full(g);
  TabularPolicy pi(g);
  pi.at(0)[0] = 0.25;
  pi.at(0)[1] = 0.75;
  NodeCounter c;
  const auto br = best_response(v, pi, Player::P2, c);
  EXPECT_DOUBLE_EQ(br.value, expected_value(v, pi, Player::P2));
  for (double x : br.policy.data()) EXPECT_EQ(x, 0.0);
}

TEST(BestResponse, CountsEachHistoryOnce) {
  const GameTree g = game("kuhn");
  const GameView v = GameView::full(g);
  NodeCounter c;
  best_response(v, TabularPolicy::uniform(g), Player::P1, c);
  EXPECT_EQ(c, (NodeCounter{0, 58, 0}));
}

TEST(BestResponse, TieBreakPrefersLowestIndex) {
  const GameTree g = build_tree(tiny::OneShot{{2.0, 2.0, 1.0}}, "oneshot");
  const GameView v = GameView::full(g);
  NodeCounter c;
  EXPECT_EQ(best_response(v, TabularPolicy(g), Player::P1, c).choice[0], 0);
}

TEST(Exploitability, AnalyticKuhnEquilibriaAreZero) {
  const GameTree g = game("kuhn");
  const GameView v = GameView::full(g);
  for (double alpha : {0.0, 0.1, 0.2, 1.0 / 3.0}) {
    const auto pi = oracle::kuhn_equilibrium(g, alpha);
    EXPECT_NEAR(exploitability(v, pi), 0.0, 1e-9) << alpha;
    EXPECT_NEAR(oracle::value_p1(g, pi), -1.0 / 18.0, 1e-12);
    EXPECT_NEAR(oracle::brute_force_br(g, pi, Player::P1) + oracle::brute_force_br(g, pi, Player::P2), 0.0, 1e-9);
  }
}

TEST(Exploitability, UniformKuhnIsPositiveAndMatchesOracle) {
  const GameTree g = game("kuhn");
  const GameView v = GameView::full(g);
  const auto u = TabularPolicy::uniform(g);
  NodeCounter c;
  const auto r = exploitability_report(v, u, c);
  EXPECT_GT(r.nash_conv, 0.0);
  EXPECT_NEAR(r.nash_conv, oracle::brute_force_br(g, u, Player::P1) + oracle::brute_force_br(g, u, Player::P2), 1e-12);
  EXPECT_EQ(c.regret_min, 0u);
  EXPECT_EQ(c.best_response, 0u);
  EXPECT_EQ(c.evaluation, 2u * 58u);
}

TEST(Exploitability, MatchingPenniesEquilibrium) {
  const GameTree g = build_tree(tiny::Pennies{}, "pennies");
  const GameView v = GameView::full(g);
  EXPECT_NEAR(exploitability(v, TabularPolicy::uniform(g)), 0.0, 1e-15);
  TabularPolicy pure(g);
  pure.at(0)[0] = pure.at(1)[0] = 1.0;
  EXPECT_DOUBLE_EQ(exploitability(v, pure), 2.0);
}

TEST(Support, FullyMixed) {
  const GameTree g = game("kuhn");
  const auto r = support_metrics(TabularPolicy::uniform(g), g);
  EXPECT_DOUBLE_EQ(r.min_pct, 1.0);
  EXPECT_DOUBLE_EQ(r.avg_pct, 1.0);
  EXPECT_FALSE(r.degenerate);
}

TEST(Support, OnePureInfostateOfTwo) {
  const GameTree g = build_tree(tiny::Pennies{}, "pennies");
  TabularPolicy pi = TabularPolicy::uniform(g);
  pi.at(1)[0] = 1.0;
  pi.at(1)[1] = 0.0;
  const auto r = support_metrics(pi, g);
  EXPECT_DOUBLE_EQ(r.min_pct, 0.5);
  EXPECT_DOUBLE_EQ(r.avg_pct, 0.75);
  EXPECT_DOUBLE_EQ(r.mean_ratio, 0.75);
  EXPECT_EQ(r.per_infoset.at("2|"), 1);
}

TEST(Support, ThresholdOneIsDegenerate) {
  const GameTree g = game("kuhn");
  const auto r = support_metrics(TabularPolicy::uniform(g), g, 1.0);
  EXPECT_DOUBLE_EQ(r.min_pct, 0.0);
  EXPECT_DOUBLE_EQ(r.avg_pct, 0.0);
  EXPECT_TRUE(r.degenerate);
  EXPECT_THROW(support_metrics(TabularPolicy::uniform(g), g, -1.0), ContractError);
}

TEST(Support, ThresholdIsStrict) {
  const GameTree g = build_tree(tiny::Pennies{}, "pennies");
  TabularPolicy pi = TabularPolicy::uniform(g);
  EXPECT_DOUBLE_EQ(support_metrics(pi, g, 0.4).avg_pct, 1.0);
  EXPECT_DOUBLE_EQ(support_metrics(pi, g, 0.5).avg_pct, 0.0);
}
