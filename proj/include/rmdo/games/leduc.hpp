#pragma once

#include <string>
#include <vector>

#include "rmdo/game_tree.hpp"

namespace rmdo::games {

// Leduc hold'em: `ranks` x 2 suits, ante 1, two betting rounds with fixed raise
// sizes and a raise cap, one public card between the rounds. Pairing the public
// card wins, otherwise the higher private rank, equal ranks split.
//
// With `duplicate` = 2 every betting action appears twice under distinct action
// indices (2k and 2k+1) with the same successor state. Observers see which
// copy was taken, so perfect recall is preserved.
struct LeducRules {
  int ranks = 3;
  int raise_sizes[2] = {2, 4};
  int max_raises = 2;
  int duplicate = 1;
  static constexpr int kSuits = 2;
  static constexpr int kAnte = 1;

  enum Move : char { kFold = 'f', kCall = 'c', kRaise = 'r' };

  struct State {
    int priv[2] = {-1, -1};
    int pub = -1;
    int round = 0;
    int to_act = 0;
    int raises = 0;
    int actions_in_round = 0;
    int contrib[2] = {kAnte, kAnte};
    bool folded = false;
    int folder = -1;
    bool done = false;
    std::string history;  // "<round1>/<round2>", one char per move plus '\'' for dummy copies
  };

  int deck() const { return ranks * kSuits; }
  static int rank_of(int card) { return card / kSuits; }

  State initial() const { return {}; }

  bool dealing(const State& s) const {
    return s.priv[0] < 0 || s.priv[1] < 0 || (s.round == 1 && s.pub < 0);
  }

  Player current_player(const State& s) const {
    if (s.done) return Player::Terminal;
    if (dealing(s)) return Player::Chance;
    return s.to_act == 0 ? Player::P1 : Player::P2;
  }

  std::vector<Move> moves(const State& s) const {
    std::vector<Move> m;
    if (s.contrib[s.to_act] < s.contrib[1 - s.to_act]) m.push_back(kFold);
    m.push_back(kCall);
    if (s.raises < max_raises) m.push_back(kRaise);
    return m;
  }

  int dealt(const State& s) const { return (s.priv[0] >= 0) + (s.priv[1] >= 0) + (s.pub >= 0); }

  int num_actions(const State& s) const {
    if (dealing(s)) return deck() - dealt(s);
    return static_cast<int>(moves(s).size()) * duplicate;
  }

  double chance_probability(const State& s, int) const { return 1.0 / (deck() - dealt(s)); }

  // a-th card of the deck not yet dealt
  int nth_free_card(const State& s, int a) const {
    for (int c = 0; c < deck(); ++c) {
      if (c == s.priv[0] || c == s.priv[1] || c == s.pub) continue;
      if (a-- == 0) return c;
    }
    throw StructuralError("leduc: chance action out of range");
  }

  State apply(const State& s, int a) const {
    State n = s;
    if (dealing(s)) {
      int card = nth_free_card(s, a);
      if (n.priv[0] < 0) n.priv[0] = card;
      else if (n.priv[1] < 0) n.priv[1] = card;
      else n.pub = card;
      return n;
    }
    const Move m = moves(s)[a / duplicate];
    const int me = s.to_act;
    n.history += static_cast<char>(m);
    if (duplicate > 1 && a % duplicate) n.history += '\'';
    ++n.actions_in_round;
    if (m == kFold) {
      n.folded = true;
      n.folder = me;
      n.done = true;
      return n;
    }
    if (m == kRaise) {
      n.contrib[me] = s.contrib[1 - me] + raise_sizes[s.round];
      ++n.raises;
      n.to_act = 1 - me;
      return n;
    }
    // call / check
    n.contrib[me] = s.contrib[1 - me];
    const bool closes = s.raises > 0 || n.actions_in_round >= 2;
    if (!closes) {
      n.to_act = 1 - me;
      return n;
    }
    if (s.round == 1) {
      n.done = true;
      return n;
    }
    n.round = 1;
    n.to_act = 0;
    n.raises = 0;
    n.actions_in_round = 0;
    n.history += '/';
    return n;
  }

  double payoff_p1(const State& s) const {
    if (s.folded) return s.folder == 0 ? -s.contrib[0] : s.contrib[1];
    const int pr = rank_of(s.pub);
    const int r0 = rank_of(s.priv[0]), r1 = rank_of(s.priv[1]);
    const bool pair0 = r0 == pr, pair1 = r1 == pr;
    int winner = -1;
    if (pair0 != pair1) winner = pair0 ? 0 : 1;
    else if (r0 != r1) winner = r0 > r1 ? 0 : 1;
    if (winner < 0) return 0.0;
    return winner == 0 ? s.contrib[1] : -s.contrib[0];
  }

  std::string infoset_key(const State& s) const {
    const int p = s.to_act;
    std::string key = std::to_string(p + 1) + ":" + std::to_string(s.priv[p]);
    key += s.pub >= 0 ? ":" + std::to_string(s.pub) : ":-";
    key += "|" + s.history;
    return key;
  }

  std::string action_label(const State& s, int a) const {
    const Move m = moves(s)[a / duplicate];
    std::string l = m == kFold ? "fold" : m == kCall ? (s.raises ? "call" : "check") : "raise";
    if (duplicate > 1 && a % duplicate) l += "'";
    return l;
  }
};

}  // namespace rmdo::games
