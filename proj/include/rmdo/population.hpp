#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "rmdo/game_tree.hpp"

namespace rmdo {

// Per-infostate sets of allowed actions. An infostate with no allowed action is
// "unlisted": a restricted view that reaches it is malformed.
class Population {
 public:
  Population() = default;

  static Population empty(const GameTree& g) {
    Population p;
    p.tree_ = &g;
    p.flags_.assign(g.total_actions(), 0);
    p.allowed_.assign(g.num_infosets(), {});
    return p;
  }

  static Population full(const GameTree& g) {
    Population p = empty(g);
    for (InfosetId s = 0; s < static_cast<InfosetId>(g.num_infosets()); ++s)
      for (int a = 0; a < g.infoset_info(s).num_actions; ++a) p.add(s, a);
    return p;
  }

  const GameTree& tree() const { return *tree_; }

  bool contains(InfosetId s, int a) const {
    return flags_[tree_->infoset_info(s).action_offset + a] != 0;
  }

  // Returns true when (s, a) was not yet present.
  bool add(InfosetId s, int a) {
    const auto& info = tree_->infoset_info(s);
    if (a < 0 || a >= info.num_actions)
      throw ContractError("action " + std::to_string(a) + " is not legal at " + info.key);
    auto& f = flags_[info.action_offset + a];
    if (f) return false;
    f = 1;
    auto& list = allowed_[s];
    list.insert(std::upper_bound(list.begin(), list.end(), a), static_cast<std::uint16_t>(a));
    ++size_;
    return true;
  }

  std::span<const std::uint16_t> allowed(InfosetId s) const { return allowed_[s]; }
  bool listed(InfosetId s) const { return !allowed_[s].empty(); }
  std::size_t size() const { return size_; }

  std::size_t num_listed() const {
    return static_cast<std::size_t>(
        std::count_if(allowed_.begin(), allowed_.end(), [](const auto& v) { return !v.empty(); }));
  }

  bool includes(const Population& other) const {
    for (std::size_t i = 0; i < flags_.size(); ++i)
      if (other.flags_[i] && !flags_[i]) return false;
    return true;
  }

  friend bool operator==(const Population& a, const Population& b) { return a.flags_ == b.flags_; }

 private:
  const GameTree* tree_ = nullptr;
  std::vector<std::uint8_t> flags_;
  std::vector<std::vector<std::uint16_t>> allowed_;
  std::size_t size_ = 0;
};

// A game tree seen through a population: decision nodes expose only the
// allowed actions of their infostate, chance nodes pass through unrestricted.
// The full game is the view through the full population.
class GameView {
 public:
  GameView(const GameTree& g, std::shared_ptr<const Population> pop)
      : tree_(&g), pop_(std::move(pop)) {
    if (&pop_->tree() != tree_) throw ContractError("population belongs to a different game");
    chance_actions_.resize(static_cast<std::size_t>(g.max_branching()));
    std::iota(chance_actions_.begin(), chance_actions_.end(), std::uint16_t{0});
  }

  static GameView full(const GameTree& g) {
    return GameView(g, std::make_shared<const Population>(Population::full(g)));
  }

  const GameTree& tree() const { return *tree_; }
  const Population& population() const { return *pop_; }
  std::shared_ptr<const Population> population_ptr() const { return pop_; }

  // Allowed action indices at a non-terminal node.
  std::span<const std::uint16_t> actions(NodeId h) const {
    const InfosetId s = tree_->infoset(h);
    if (s == kNoInfoset)
      return std::span<const std::uint16_t>(chance_actions_).first(tree_->num_actions(h));
    return pop_->allowed(s);
  }

  std::vector<int> legal_actions(NodeId h) const {
    if (h >= tree_->num_nodes()) throw StructuralError("unknown history id " + std::to_string(h));
    if (tree_->is_terminal(h)) return {};
    auto acts = actions(h);
    return {acts.begin(), acts.end()};
  }

 private:
  const GameTree* tree_;
  std::shared_ptr<const Population> pop_;
  std::vector<std::uint16_t> chance_actions_;
};

// Statistics of the tree reachable inside a view.
struct RestrictedStats {
  std::size_t sum_infosets = 0;      // sum over players of reachable infostates
  int max_branching = 0;             // max allowed-action count at a reachable infostate
  int horizon = 0;                   // max over players of own decisions on a path
  std::size_t num_histories = 0;
  int window = 0;
};

inline RestrictedStats restricted_stats(const GameView& view, NodeCounter& counter,
                                        NodeCategory category = NodeCategory::Evaluation) {
  const GameTree& g = view.tree();
  RestrictedStats st;
  std::vector<std::uint8_t> seen(g.num_infosets(), 0);
  struct Item {
    NodeId h;
    int own[2];
  };
  std::vector<Item> stack{{g.root(), {0, 0}}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    counter.count_visit(category);
    ++st.num_histories;
    const Player p = g.owner(it.h);
    if (p == Player::Terminal) {
      st.horizon = std::max({st.horizon, it.own[0], it.own[1]});
      continue;
    }
    Item next = it;
    if (p != Player::Chance) {
      const InfosetId s = g.infoset(it.h);
      if (!view.population().listed(s))
        throw StructuralError("restricted view reaches infostate without allowed actions: " +
                              g.infoset_info(s).key);
      if (!seen[s]) {
        seen[s] = 1;
        ++st.sum_infosets;
        st.max_branching = std::max<int>(st.max_branching, static_cast<int>(view.actions(it.h).size()));
      }
      ++next.own[index_of(p)];
    }
    for (auto a : view.actions(it.h)) stack.push_back({g.child(it.h, a), {next.own[0], next.own[1]}});
  }
  return st;
}

// Infostates reachable inside the view, in id order.
inline std::vector<InfosetId> reachable_infosets(const GameView& view) {
  const GameTree& g = view.tree();
  std::vector<std::uint8_t> seen(g.num_infosets(), 0);
  std::vector<NodeId> stack{g.root()};
  while (!stack.empty()) {
    NodeId h = stack.back();
    stack.pop_back();
    if (g.is_terminal(h)) continue;
    if (!g.is_chance(h)) {
      const InfosetId s = g.infoset(h);
      if (!view.population().listed(s)) continue;
      seen[s] = 1;
    }
    for (auto a : view.actions(h)) stack.push_back(g.child(h, a));
  }
  std::vector<InfosetId> out;
  for (InfosetId s = 0; s < static_cast<InfosetId>(seen.size()); ++s)
    if (seen[s]) out.push_back(s);
  return out;
}

}  // namespace rmdo
