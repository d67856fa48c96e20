#pragma once

#include <string>
#include <vector>

#include "rmdo/game_tree.hpp"

namespace rmdo::games {

// Kuhn poker with a configurable deck size and stack. With stack 2 this is the
// standard game (bet size 1). Larger stacks let the opening bettor choose any
// integer bet from 1 to stack-1; a player facing a bet may only fold or call.
struct KuhnRules {
  int cards = 3;
  int stack = 2;
  static constexpr int kAnte = 1;

  struct State {
    int deal[2] = {-1, -1};
    // Betting line: 0 = check, k > 0 = bet k, -1 = fold, -2 = call.
    std::vector<int> line;
    int bet = 0;        // outstanding bet size
    int bettor = -1;
  };

  int max_bet() const { return stack - kAnte; }

  State initial() const { return {}; }

  Player current_player(const State& s) const {
    if (s.deal[0] < 0 || s.deal[1] < 0) return Player::Chance;
    const auto& l = s.line;
    if (l.empty()) return Player::P1;
    if (l.back() < 0) return Player::Terminal;  // fold or call closes the hand
    if (l.size() == 1) return Player::P2;
    // check then check closes; check then bet gives P1 the fold/call decision
    if (l.size() == 2 && l[0] == 0 && l[1] == 0) return Player::Terminal;
    return Player::P1;
  }

  int num_actions(const State& s) const {
    if (s.deal[0] < 0) return cards;
    if (s.deal[1] < 0) return cards - 1;
    return s.bet > 0 ? 2 : 1 + max_bet();
  }

  double chance_probability(const State& s, int) const {
    return s.deal[0] < 0 ? 1.0 / cards : 1.0 / (cards - 1);
  }

  State apply(const State& s, int a) const {
    State n = s;
    if (s.deal[0] < 0) {
      n.deal[0] = a;
    } else if (s.deal[1] < 0) {
      n.deal[1] = a < s.deal[0] ? a : a + 1;
    } else if (s.bet > 0) {
      n.line.push_back(a == 0 ? -1 : -2);
    } else {
      n.line.push_back(a);
      if (a > 0) {
        n.bet = a;
        n.bettor = static_cast<int>(s.line.size() % 2);
      }
    }
    return n;
  }

  double payoff_p1(const State& s) const {
    const int last = s.line.back();
    if (last == -1) {
      // folder loses the ante; the bettor is the other player
      return s.bettor == 0 ? kAnte : -kAnte;
    }
    const int stake = kAnte + (last == -2 ? s.bet : 0);
    return s.deal[0] > s.deal[1] ? stake : -stake;
  }

  std::string token(int x) const {
    if (x == -1) return "f";
    if (x == -2) return "c";
    if (x == 0) return "k";
    return "b" + std::to_string(x);
  }

  std::string infoset_key(const State& s) const {
    const int p = index_of(current_player(s));
    std::string key = std::to_string(p + 1) + ":" + std::to_string(s.deal[p]) + "|";
    for (int x : s.line) key += token(x);
    return key;
  }

  std::string action_label(const State& s, int a) const {
    if (s.bet > 0) return a == 0 ? "fold" : "call";
    if (a == 0) return "check";
    return stack == 2 ? std::string("bet") : "bet" + std::to_string(a);
  }
};

}  // namespace rmdo::games
