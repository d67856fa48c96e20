#pragma once

#include <string>
#include <vector>

#include "rmdo/game_tree.hpp"

namespace rmdo::games {

// Oshi Zumo on a board of 2K+1 cells with the token starting in the middle.
// Each round both players bid secretly (P1 moves first, P2 does not observe the
// pending bid); the higher bid pushes the token one cell toward the opponent
// and spent coins are lost. Bids are at least 1 while a player has coins and a
// forced 0 otherwise. The game ends when the token leaves the board or both
// players are out of coins.
//
// Scoring::Edge pays +-1 only for pushing the token off the board (0 otherwise).
// Scoring::Side additionally awards the win to the player on whose opponent's
// half the token rests at the end.
struct OshiZumoRules {
  enum class Scoring { Edge = 1, Side = 2 };

  int coins = 4;
  int k = 6;
  Scoring scoring = Scoring::Edge;

  struct State {
    int coins[2] = {0, 0};
    int pos = 0;
    int pending = -1;  // P1 bid waiting for P2
    std::vector<std::pair<int, int>> bids;
  };

  int board_length() const { return 2 * k + 1; }

  State initial() const {
    State s;
    s.coins[0] = s.coins[1] = coins;
    s.pos = k;
    return s;
  }

  bool off_board(const State& s) const { return s.pos < 0 || s.pos > 2 * k; }

  Player current_player(const State& s) const {
    if (off_board(s) || (s.coins[0] == 0 && s.coins[1] == 0 && s.pending < 0))
      return Player::Terminal;
    return s.pending < 0 ? Player::P1 : Player::P2;
  }

  int to_act(const State& s) const { return s.pending < 0 ? 0 : 1; }

  int num_actions(const State& s) const {
    const int c = s.coins[to_act(s)];
    return c > 0 ? c : 1;
  }

  int bid_of(const State& s, int a) const { return s.coins[to_act(s)] > 0 ? a + 1 : 0; }

  double chance_probability(const State&, int) const { return 1.0; }

  State apply(const State& s, int a) const {
    State n = s;
    const int bid = bid_of(s, a);
    if (s.pending < 0) {
      n.pending = bid;
      return n;
    }
    const int b1 = s.pending, b2 = bid;
    n.coins[0] -= b1;
    n.coins[1] -= b2;
    if (b1 > b2) ++n.pos;
    else if (b2 > b1) --n.pos;
    n.pending = -1;
    n.bids.emplace_back(b1, b2);
    return n;
  }

  double payoff_p1(const State& s) const {
    if (s.pos > 2 * k) return 1.0;
    if (s.pos < 0) return -1.0;
    if (scoring == Scoring::Side) {
      if (s.pos > k) return 1.0;
      if (s.pos < k) return -1.0;
    }
    return 0.0;
  }

  std::string infoset_key(const State& s) const {
    std::string key = to_act(s) == 0 ? "1|" : "2|";
    for (auto [b1, b2] : s.bids) key += std::to_string(b1) + "-" + std::to_string(b2) + ",";
    return key;
  }

  std::string action_label(const State& s, int a) const {
    return "bid" + std::to_string(bid_of(s, a));
  }
};

}  // namespace rmdo::games
