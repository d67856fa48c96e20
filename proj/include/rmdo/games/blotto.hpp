#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rmdo/game_tree.hpp"

namespace rmdo::games {

// Sequential discrete Colonel Blotto. Each player owns forces of strength
// 0..forces-1, each usable once. Players alternate deployments P1, P2, P1, ...;
// every P1/P2 pair is one fight whose outcome for P1 is the strength difference
// (or its sign). The payoff is the sum over fights. Perfect information.
struct BlottoRules {
  enum class Outcome { Difference = 1, Sign = 2 };

  int forces = 20;
  int deployments = 4;
  Outcome outcome = Outcome::Difference;

  struct State {
    std::uint64_t used[2] = {0, 0};
    std::vector<int> deployed;  // strengths in deployment order
    double total = 0.0;
  };

  State initial() const { return {}; }

  Player current_player(const State& s) const {
    const int d = static_cast<int>(s.deployed.size());
    if (d == deployments) return Player::Terminal;
    return d % 2 == 0 ? Player::P1 : Player::P2;
  }

  int num_actions(const State& s) const {
    const int d = static_cast<int>(s.deployed.size());
    return forces - d / 2;  // each player has deployed d/2 forces so far
  }

  double chance_probability(const State&, int) const { return 1.0; }

  int strength_of(const State& s, int a) const {
    const int p = static_cast<int>(s.deployed.size() % 2);
    for (int f = 0; f < forces; ++f) {
      if (s.used[p] >> f & 1u) continue;
      if (a-- == 0) return f;
    }
    throw StructuralError("blotto: deployment index out of range");
  }

  State apply(const State& s, int a) const {
    State n = s;
    const int p = static_cast<int>(s.deployed.size() % 2);
    const int f = strength_of(s, a);
    n.used[p] |= std::uint64_t{1} << f;
    n.deployed.push_back(f);
    if (p == 1) {
      const int diff = n.deployed[n.deployed.size() - 2] - f;
      n.total += outcome == Outcome::Difference ? diff : (diff > 0) - (diff < 0);
    }
    return n;
  }

  double payoff_p1(const State& s) const { return s.total; }

  std::string infoset_key(const State& s) const {
    std::string key = s.deployed.size() % 2 == 0 ? "1|" : "2|";
    for (int f : s.deployed) key += std::to_string(f) + ",";
    return key;
  }

  std::string action_label(const State& s, int a) const {
    return "force" + std::to_string(strength_of(s, a));
  }
};

}  // namespace rmdo::games
