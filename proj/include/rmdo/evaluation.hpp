#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "rmdo/game_tree.hpp"
#include "rmdo/policy.hpp"
#include "rmdo/population.hpp"

namespace rmdo {

namespace detail {

inline void check_distribution(const GameView& view, const TabularPolicy& pi, InfosetId s) {
  double mass = 0.0;
  for (auto a : view.population().allowed(s)) mass += pi.prob(s, a);
  if (std::abs(mass - 1.0) > 1e-6)
    throw ContractError("policy is incomplete at infostate " + view.tree().infoset_info(s).key);
}

}  // namespace detail

// Exact expected payoff of player i under `policy` by full traversal of the view.
inline double expected_value(const GameView& view, const TabularPolicy& policy, Player i, NodeCounter& counter,
                             NodeCategory category = NodeCategory::Evaluation) {
  if (i != Player::P1 && i != Player::P2) throw ContractError("expected_value needs a decision player");
  const GameTree& g = view.tree();
  std::vector<std::uint8_t> checked(g.num_infosets(), 0);
  auto rec = [&](auto&& self, NodeId h) -> double {
    counter.count_visit(category);
    const Player owner = g.owner(h);
    if (owner == Player::Terminal) return g.payoff(h, i);
    double v = 0.0;
    if (owner == Player::Chance) {
      for (auto a : view.actions(h)) {
        const NodeId c = g.child(h, a);
        v += g.chance_probability(c) * self(self, c);
      }
      return v;
    }
    const InfosetId s = g.infoset(h);
    if (!checked[s]) {
      detail::check_distribution(view, policy, s);
      checked[s] = 1;
    }
    for (auto a : view.actions(h)) {
      const double p = policy.prob(s, a);
      if (p > 0.0) v += p * self(self, g.child(h, a));
    }
    return v;
  };
  return rec(rec, g.root());
}

inline double expected_value(const GameView& view, const TabularPolicy& policy, Player i) {
  NodeCounter scratch;
  return expected_value(view, policy, i, scratch);
}

struct BestResponseResult {
  Player responder = Player::P1;
  double value = 0.0;
  std::vector<int> choice;  // per infostate: chosen action, -1 if not a visited responder infostate
  TabularPolicy policy;     // pure: probability 1 on `choice` at responder infostates
};

// Opponent-reach-weighted expectimax over the responder's infostates. Scratch
// buffers are kept between calls so repeated checks do not reallocate.
class BestResponder {
 public:
  explicit BestResponder(const GameView& view) : view_(view), g_(view.tree()) {}

  BestResponseResult compute(const TabularPolicy& opponent, Player responder, NodeCounter& counter,
                             NodeCategory category = NodeCategory::BestResponse) {
    if (responder != Player::P1 && responder != Player::P2)
      throw ContractError("best_response needs a decision player");
    opp_ = &opponent;
    responder_ = responder;
    reach_.assign(g_.num_nodes(), -1.0);
    value_.assign(g_.num_nodes(), std::numeric_limits<double>::quiet_NaN());
    choice_.assign(g_.num_infosets(), -1);

    // Top-down pass: counterfactual reach (chance x opponent) of every history.
    std::vector<NodeId> stack{g_.root()};
    reach_[g_.root()] = 1.0;
    std::uint64_t visited = 0;
    while (!stack.empty()) {
      const NodeId h = stack.back();
      stack.pop_back();
      ++visited;
      const Player owner = g_.owner(h);
      if (owner == Player::Terminal) continue;
      const double r = reach_[h];
      auto acts = view_.actions(h);
      if (owner != Player::Chance && acts.empty())
        throw StructuralError("infostate with no allowed actions: " + g_.infoset_info(g_.infoset(h)).key);
      for (auto a : acts) {
        const NodeId c = g_.child(h, a);
        double w = 1.0;
        if (owner == Player::Chance) w = g_.chance_probability(c);
        else if (owner != responder_) w = opponent.prob(g_.infoset(h), a);
        reach_[c] = r * w;
        stack.push_back(c);
      }
    }
    counter.count_visit(category, visited);

    BestResponseResult res;
    res.responder = responder;
    res.value = value(g_.root());
    res.choice = choice_;
    res.policy = TabularPolicy(g_);
    for (InfosetId s : g_.infosets_of(responder))
      if (choice_[s] >= 0) res.policy.at(s)[choice_[s]] = 1.0;
    return res;
  }

 private:
  double value(NodeId h) {
    double& memo = value_[h];
    if (!std::isnan(memo)) return memo;
    const Player owner = g_.owner(h);
    double v = 0.0;
    if (owner == Player::Terminal) {
      v = g_.payoff_p1(h);
      if (responder_ == Player::P2) v = -v;
    } else if (owner == Player::Chance) {
      for (auto a : view_.actions(h)) {
        const NodeId c = g_.child(h, a);
        v += g_.chance_probability(c) * value(c);
      }
    } else if (owner != responder_) {
      const InfosetId s = g_.infoset(h);
      for (auto a : view_.actions(h)) {
        const double p = opp_->prob(s, a);
        const double cv = value(g_.child(h, a));
        if (p > 0.0) v += p * cv;
      }
    } else {
      v = value(g_.child(h, best_action(g_.infoset(h))));
    }
    memo = v;
    return v;
  }

  int best_action(InfosetId s) {
    if (choice_[s] >= 0) return choice_[s];
    auto acts = view_.actions(g_.infoset_info(s).members.front());
    std::vector<double> scores(acts.size(), 0.0);
    for (NodeId h : g_.infoset_info(s).members) {
      if (reach_[h] < 0.0) continue;  // not part of the view
      for (std::size_t i = 0; i < acts.size(); ++i) scores[i] += reach_[h] * value(g_.child(h, acts[i]));
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < acts.size(); ++i)
      if (scores[i] > scores[best] + 1e-12 * (1.0 + std::abs(scores[best]))) best = i;
    choice_[s] = acts[best];
    return choice_[s];
  }

  const GameView& view_;
  const GameTree& g_;
  const TabularPolicy* opp_ = nullptr;
  Player responder_ = Player::P1;
  std::vector<double> reach_;
  std::vector<double> value_;
  std::vector<int> choice_;
};

inline BestResponseResult best_response(const GameView& view, const TabularPolicy& opponent, Player responder,
                                        NodeCounter& counter, NodeCategory category = NodeCategory::BestResponse) {
  BestResponder br(view);
  return br.compute(opponent, responder, counter, category);
}

struct ExploitabilityReport {
  double nash_conv = 0.0;                // sum of both best-response values
  std::array<double, 2> br_value{0, 0};
};

// e(pi) = sum_i [BR_i(pi_-i) - v_i(pi)]; in a zero-sum game the v_i cancel.
inline ExploitabilityReport exploitability_report(const GameView& view, const TabularPolicy& policy,
                                                  NodeCounter& counter,
                                                  NodeCategory category = NodeCategory::Evaluation) {
  BestResponder br(view);
  ExploitabilityReport r;
  for (Player p : kDecisionPlayers) r.br_value[index_of(p)] = br.compute(policy, p, counter, category).value;
  r.nash_conv = r.br_value[0] + r.br_value[1];
  return r;
}

inline double exploitability(const GameView& view, const TabularPolicy& policy, NodeCounter& counter,
                             NodeCategory category = NodeCategory::Evaluation) {
  return exploitability_report(view, policy, counter, category).nash_conv;
}

inline double exploitability(const GameView& view, const TabularPolicy& policy) {
  NodeCounter scratch;
  return exploitability(view, policy, scratch);
}

//------------------------------------------------------------------------------
// Support metrics
//------------------------------------------------------------------------------

struct SupportReport {
  double min_pct = 0.0;     // min_s supp(s) / |A(s)|
  double avg_pct = 0.0;     // sum_s supp(s) / sum_s |A(s)|
  double mean_ratio = 0.0;  // mean over infostates of supp(s) / |A(s)|
  bool degenerate = false;  // some infostate has empty support under the threshold
  std::map<std::string, int> per_infoset;
};

// supp(s) counts actions with probability strictly above `threshold`.
inline SupportReport support_metrics(const TabularPolicy& policy, const GameTree& g, double threshold = 1e-9) {
  if (threshold < 0.0) throw ContractError("support threshold must be non-negative");
  SupportReport r;
  r.min_pct = 1.0;
  double supp_total = 0.0, action_total = 0.0, ratio_total = 0.0;
  for (InfosetId s = 0; s < static_cast<InfosetId>(g.num_infosets()); ++s) {
    const auto& info = g.infoset_info(s);
    int supp = 0;
    for (double p : policy.at(s)) supp += p > threshold;
    r.per_infoset[info.key] = supp;
    if (supp == 0) r.degenerate = true;
    const double ratio = static_cast<double>(supp) / info.num_actions;
    r.min_pct = std::min(r.min_pct, ratio);
    supp_total += supp;
    action_total += info.num_actions;
    ratio_total += ratio;
  }
  if (g.num_infosets() == 0) return r;
  r.avg_pct = supp_total / action_total;
  r.mean_ratio = ratio_total / static_cast<double>(g.num_infosets());
  return r;
}

}  // namespace rmdo
