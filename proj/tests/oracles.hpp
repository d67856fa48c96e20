#pragma once
// Reference computations written without the library's evaluation code, so
// tests compare two independent implementations.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "rmdo/game_tree.hpp"
#include "rmdo/games/registry.hpp"
#include "rmdo/policy.hpp"

namespace oracle {

using namespace rmdo;

// Expected payoff to P1 by plain recursion over the tree, with a behavior
// profile given as a lookup function.
inline double value_p1(const GameTree& g, NodeId h, const std::function<double(InfosetId, int)>& prob) {
  if (g.is_terminal(h)) return g.payoff_p1(h);
  double v = 0.0;
  for (int a = 0; a < g.num_actions(h); ++a) {
    const NodeId c = g.child(h, a);
    const double p = g.is_chance(h) ? g.chance_probability(c) : prob(g.infoset(h), a);
    if (p != 0.0) v += p * value_p1(g, c, prob);
  }
  return v;
}

inline double value_p1(const GameTree& g, const TabularPolicy& pi) {
  return value_p1(g, g.root(), [&](InfosetId s, int a) { return pi.prob(s, a); });
}

// Best response value by enumerating every pure strategy of `responder`.
inline double brute_force_br(const GameTree& g, const TabularPolicy& opponent, Player responder) {
  const auto& mine = g.infosets_of(responder);
  std::map<InfosetId, std::size_t> slot;
  for (std::size_t i = 0; i < mine.size(); ++i) slot[mine[i]] = i;
  std::vector<int> pure(mine.size(), 0);
  double best = -1e300;
  const double sign = responder == Player::P1 ? 1.0 : -1.0;
  for (;;) {
    const double v = sign * value_p1(g, g.root(), [&](InfosetId s, int a) {
      if (g.infoset_info(s).player == responder) return pure[slot[s]] == a ? 1.0 : 0.0;
      return opponent.prob(s, a);
    });
    best = std::max(best, v);
    std::size_t i = 0;
    for (; i < pure.size(); ++i) {
      if (++pure[i] < g.infoset_info(mine[i]).num_actions) break;
      pure[i] = 0;
    }
    if (i == pure.size()) break;
  }
  return best;
}

// Monte Carlo estimate of P1's value: mean and standard error over `n` rollouts.
inline std::pair<double, double> rollout_p1(const GameTree& g, const TabularPolicy& pi, std::size_t n,
                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double sum = 0.0, sq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    NodeId h = g.root();
    while (!g.is_terminal(h)) {
      const double r = u(rng);
      double acc = 0.0;
      int pick = g.num_actions(h) - 1;
      for (int a = 0; a < g.num_actions(h); ++a) {
        acc += g.is_chance(h) ? g.chance_probability(g.child(h, a)) : pi.prob(g.infoset(h), a);
        if (r < acc) {
          pick = a;
          break;
        }
      }
      h = g.child(h, pick);
    }
    const double x = g.payoff_p1(h);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / static_cast<double>(n);
  const double var = (sq / static_cast<double>(n) - mean * mean) * static_cast<double>(n) / (n - 1.0);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

// Counterfactual value of infostate s for its owner: sum over member
// histories of (chance x opponent reach) times the owner's expected payoff.
inline double counterfactual_value(const GameTree& g, const TabularPolicy& pi, InfosetId s) {
  const Player p = g.infoset_info(s).player;
  const double sign = p == Player::P1 ? 1.0 : -1.0;
  auto prob = [&](InfosetId t, int a) { return pi.prob(t, a); };
  double total = 0.0;
  for (NodeId h : g.infoset_info(s).members) {
    double reach = 1.0;
    for (NodeId cur = h; cur != g.root();) {
      const NodeId parent = g.node(cur).parent;
      const int a = g.node(cur).action_from_parent;
      if (g.is_chance(parent))
        reach *= g.chance_probability(cur);
      else if (g.owner(parent) != p)
        reach *= pi.prob(g.infoset(parent), a);
      cur = parent;
    }
    total += reach * sign * value_p1(g, h, prob);
  }
  return total;
}

// Member of the analytic Kuhn equilibrium family, parametrized by alpha in
// [0, 1/3]. Keys follow "<player>:<card>|<line>" with k = check, b1 = bet.
inline TabularPolicy kuhn_equilibrium(const GameTree& g, double alpha) {
  TabularPolicy pi(g);
  auto set = [&](const std::string& key, double p_second) {
    const InfosetId s = g.find_infoset(key);
    if (s == kNoInfoset) throw std::runtime_error("missing infostate " + key);
    pi.at(s)[0] = 1.0 - p_second;
    pi.at(s)[1] = p_second;
  };
  // P1 opening: action 1 = bet
  set("1:0|", alpha);
  set("1:1|", 0.0);
  set("1:2|", 3.0 * alpha);
  // P1 after check, bet: action 1 = call
  set("1:0|kb1", 0.0);
  set("1:1|kb1", alpha + 1.0 / 3.0);
  set("1:2|kb1", 1.0);
  // P2 facing a bet: action 1 = call
  set("2:0|b1", 0.0);
  set("2:1|b1", 1.0 / 3.0);
  set("2:2|b1", 1.0);
  // P2 after a check: action 1 = bet
  set("2:0|k", 1.0 / 3.0);
  set("2:1|k", 0.0);
  set("2:2|k", 1.0);
  return pi;
}

inline TabularPolicy random_policy(const GameTree& g, std::mt19937_64& rng) {
  TabularPolicy pi(g);
  std::exponential_distribution<double> e(1.0);
  for (InfosetId s = 0; s < static_cast<InfosetId>(g.num_infosets()); ++s) {
    auto p = pi.at(s);
    double z = 0.0;
    for (auto& x : p) z += (x = e(rng));
    for (auto& x : p) x /= z;
  }
  return pi;
}

inline GameTree game(const std::string& name, std::map<std::string, long long> params = {}) {
  return build_game(GameConfig{name, std::move(params)});
}

}  // namespace oracle
