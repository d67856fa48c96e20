#pragma once

#include <span>
#include <vector>

#include "rmdo/game_tree.hpp"
#include "rmdo/population.hpp"

namespace rmdo {

// Behavior policy for both players, laid out like the tree's flat
// (infostate, action) table. Actions outside a population carry probability 0.
class TabularPolicy {
 public:
  TabularPolicy() = default;
  explicit TabularPolicy(const GameTree& g) : tree_(&g), probs_(g.total_actions(), 0.0) {}

  static TabularPolicy uniform(const GameTree& g) {
    TabularPolicy p(g);
    for (const auto& info : g.infosets())
      for (int a = 0; a < info.num_actions; ++a) p.probs_[info.action_offset + a] = 1.0 / info.num_actions;
    return p;
  }

  // Uniform over the allowed actions of every listed infostate.
  static TabularPolicy uniform(const Population& pop) {
    const GameTree& g = pop.tree();
    TabularPolicy p(g);
    for (InfosetId s = 0; s < static_cast<InfosetId>(g.num_infosets()); ++s) {
      auto allowed = pop.allowed(s);
      for (auto a : allowed) p.at(s)[a] = 1.0 / static_cast<double>(allowed.size());
    }
    return p;
  }

  const GameTree& tree() const { return *tree_; }
  bool empty() const { return tree_ == nullptr; }

  std::span<double> at(InfosetId s) {
    const auto& info = tree_->infoset_info(s);
    return {probs_.data() + info.action_offset, static_cast<std::size_t>(info.num_actions)};
  }
  std::span<const double> at(InfosetId s) const {
    const auto& info = tree_->infoset_info(s);
    return {probs_.data() + info.action_offset, static_cast<std::size_t>(info.num_actions)};
  }
  double prob(InfosetId s, int a) const { return probs_[tree_->infoset_info(s).action_offset + a]; }

  std::vector<double>& data() { return probs_; }
  const std::vector<double>& data() const { return probs_; }

  friend bool operator==(const TabularPolicy& a, const TabularPolicy& b) { return a.probs_ == b.probs_; }

 private:
  const GameTree* tree_ = nullptr;
  std::vector<double> probs_;
};

}  // namespace rmdo
