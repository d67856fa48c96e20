#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "rmdo/game_tree.hpp"
#include "rmdo/policy.hpp"
#include "rmdo/population.hpp"

namespace rmdo {

//------------------------------------------------------------------------------
// Regret matching
//------------------------------------------------------------------------------

// Writes the regret-matching policy for `regrets` into `out`: proportional to
// the strictly positive parts, uniform when none is positive.
inline void regret_matching(std::span<const double> regrets, std::span<double> out) {
  if (regrets.empty()) throw ContractError("regret_matching on an empty vector");
  double total = 0.0;
  for (double r : regrets) total += r > 0.0 ? r : 0.0;
  if (total > 0.0) {
    for (std::size_t i = 0; i < regrets.size(); ++i) out[i] = regrets[i] > 0.0 ? regrets[i] / total : 0.0;
  } else {
    const double u = 1.0 / static_cast<double>(regrets.size());
    for (std::size_t i = 0; i < regrets.size(); ++i) out[i] = u;
  }
}

inline std::vector<double> regret_matching(std::span<const double> regrets) {
  std::vector<double> out(regrets.size());
  regret_matching(regrets, out);
  return out;
}

//------------------------------------------------------------------------------
// Tables
//------------------------------------------------------------------------------

enum class WeightScheme { Uniform, Linear };

// Weight of iteration t (1-based) in regret and average-strategy accumulation.
inline double iteration_weight(WeightScheme w, std::uint64_t t) {
  if (t == 0) throw ContractError("iterations are 1-based");
  return w == WeightScheme::Linear ? static_cast<double>(t) : 1.0;
}

// Cumulative regrets, window strategy accumulator (last-window average),
// overall accumulator (never reset) and the current policy. All vectors use the
// tree's flat (infostate, action) layout; entries of actions outside the
// current population stay untouched.
struct ProfileTables {
  std::vector<double> regrets;
  std::vector<double> strategy_sum;
  std::vector<double> total_strategy_sum;
  std::vector<double> current;

  static ProfileTables zeros(const GameTree& g) {
    ProfileTables t;
    t.regrets.assign(g.total_actions(), 0.0);
    t.strategy_sum.assign(g.total_actions(), 0.0);
    t.total_strategy_sum.assign(g.total_actions(), 0.0);
    t.current.assign(g.total_actions(), 0.0);
    return t;
  }

  friend bool operator==(const ProfileTables&, const ProfileTables&) = default;
};

namespace detail {

// Applies regret matching at `s` over the view's allowed actions.
inline void refresh_infoset(const Population& pop, const GameTree& g, ProfileTables& t, InfosetId s) {
  auto allowed = pop.allowed(s);
  if (allowed.empty()) return;
  const std::size_t off = g.infoset_info(s).action_offset;
  double total = 0.0;
  for (auto a : allowed) total += std::max(t.regrets[off + a], 0.0);
  if (total > 0.0) {
    for (auto a : allowed) t.current[off + a] = std::max(t.regrets[off + a], 0.0) / total;
  } else {
    const double u = 1.0 / static_cast<double>(allowed.size());
    for (auto a : allowed) t.current[off + a] = u;
  }
}

}  // namespace detail

inline void refresh_policies(const GameView& view, ProfileTables& t, Player p) {
  for (InfosetId s : view.tree().infosets_of(p)) detail::refresh_infoset(view.population(), view.tree(), t, s);
}

inline void refresh_policies(const GameView& view, ProfileTables& t) {
  refresh_policies(view, t, Player::P1);
  refresh_policies(view, t, Player::P2);
}

inline TabularPolicy current_policy(const GameView& view, const ProfileTables& t) {
  TabularPolicy p(view.tree());
  p.data() = t.current;
  return p;
}

//------------------------------------------------------------------------------
// Average policy
//------------------------------------------------------------------------------

struct AveragePolicy {
  TabularPolicy policy;
  std::vector<InfosetId> unreached;  // zero accumulated weight, filled uniformly
};

// Normalizes an accumulator over each listed infostate's allowed actions.
// Actions outside the population get probability 0; unlisted infostates and
// infostates with zero weight get a uniform distribution and are flagged.
inline AveragePolicy average_policy(const Population& pop, std::span<const double> acc) {
  const GameTree& g = pop.tree();
  AveragePolicy out{TabularPolicy(g), {}};
  for (InfosetId s = 0; s < static_cast<InfosetId>(g.num_infosets()); ++s) {
    const auto& info = g.infoset_info(s);
    auto probs = out.policy.at(s);
    auto allowed = pop.allowed(s);
    if (allowed.empty()) {
      for (auto& p : probs) p = 1.0 / info.num_actions;
      out.unreached.push_back(s);
      continue;
    }
    double total = 0.0;
    for (auto a : allowed) total += acc[info.action_offset + a];
    if (total > 0.0) {
      for (auto a : allowed) probs[a] = acc[info.action_offset + a] / total;
    } else {
      for (auto a : allowed) probs[a] = 1.0 / static_cast<double>(allowed.size());
      out.unreached.push_back(s);
    }
  }
  return out;
}

//------------------------------------------------------------------------------
// Full-tree CFR iteration (alternating updates)
//------------------------------------------------------------------------------

namespace detail {

class CfrSweep {
 public:
  CfrSweep(const GameView& view, ProfileTables& t, double weight, NodeCounter& counter)
      : view_(view), g_(view.tree()), t_(t), weight_(weight), counter_(counter),
        seen_(g_.num_infosets(), 0),
        scratch_(static_cast<std::size_t>(g_.max_depth() + 1) * static_cast<std::size_t>(g_.max_branching())) {}

  void run(Player p) {
    player_ = p;
    std::fill(seen_.begin(), seen_.end(), 0);
    traverse(g_.root(), 1.0, 1.0);
    refresh_policies(view_, t_, p);
  }

 private:
  double traverse(NodeId h, double reach_self, double reach_other) {
    counter_.count_visit(NodeCategory::RegretMin);
    const Player owner = g_.owner(h);
    if (owner == Player::Terminal) {
      const double u = g_.payoff_p1(h);
      return player_ == Player::P1 ? u : -u;
    }
    auto acts = view_.actions(h);
    if (owner == Player::Chance) {
      double v = 0.0;
      for (auto a : acts) {
        const NodeId c = g_.child(h, a);
        const double pr = g_.chance_probability(c);
        v += pr * traverse(c, reach_self, reach_other * pr);
      }
      return v;
    }
    const InfosetId s = g_.infoset(h);
    if (acts.empty())
      throw StructuralError("infostate with no allowed actions: " + g_.infoset_info(s).key);
    const std::size_t off = g_.infoset_info(s).action_offset;
    const double* pi = t_.current.data() + off;

    if (owner != player_) {
      double v = 0.0;
      for (auto a : acts) v += pi[a] * traverse(g_.child(h, a), reach_self, reach_other * pi[a]);
      return v;
    }

    double* vals = scratch_.data() + static_cast<std::size_t>(g_.node(h).depth) * g_.max_branching();
    double v = 0.0;
    for (std::size_t i = 0; i < acts.size(); ++i) {
      const auto a = acts[i];
      vals[i] = traverse(g_.child(h, a), reach_self * pi[a], reach_other);
      v += pi[a] * vals[i];
    }
    for (std::size_t i = 0; i < acts.size(); ++i)
      t_.regrets[off + acts[i]] += weight_ * reach_other * (vals[i] - v);
    if (!seen_[s]) {
      seen_[s] = 1;
      for (auto a : acts) {
        const double w = weight_ * reach_self * pi[a];
        t_.strategy_sum[off + a] += w;
        t_.total_strategy_sum[off + a] += w;
      }
    }
    return v;
  }

  const GameView& view_;
  const GameTree& g_;
  ProfileTables& t_;
  double weight_;
  NodeCounter& counter_;
  Player player_ = Player::P1;
  std::vector<std::uint8_t> seen_;
  std::vector<double> scratch_;
};

}  // namespace detail

// One CFR iteration on the view: a full sweep updating P1, then one updating
// P2 against P1's refreshed policy. Regret increments and strategy
// accumulation are both scaled by `weight` (1 for vanilla CFR, t for linear).
inline void cfr_iteration(const GameView& view, ProfileTables& tables, double weight, NodeCounter& counter) {
  if (!(weight >= 1.0)) throw ContractError("cfr_iteration weight must be >= 1");
  detail::CfrSweep sweep(view, tables, weight, counter);
  refresh_policies(view, tables);
  sweep.run(Player::P1);
  sweep.run(Player::P2);
}

//------------------------------------------------------------------------------
// Outcome-sampling MCCFR
//------------------------------------------------------------------------------

class SamplerParams {
 public:
  explicit SamplerParams(double explore = 0.6, std::uint64_t seed = 0) : explore_(explore), seed_(seed) {
    if (!(explore > 0.0 && explore <= 1.0)) throw ContractError("explore must lie in (0, 1]");
  }
  double explore() const { return explore_; }
  std::uint64_t seed() const { return seed_; }

 private:
  double explore_;
  std::uint64_t seed_;
};

using Rng = std::mt19937_64;

// What one regret update at an updating player's history observed. Values are
// importance-corrected counterfactual estimates; their expectation over
// trajectories equals the exact counterfactual values at the infostate.
struct OsUpdate {
  Player player;
  InfosetId infoset;
  NodeId history;
  double cf_value;
  std::span<const std::uint16_t> actions;
  std::span<const double> action_cf_values;  // aligned with `actions`
};
using OsObserver = std::function<void(const OsUpdate&)>;

namespace detail {

class OutcomeSampler {
 public:
  OutcomeSampler(const GameView& view, ProfileTables& t, const SamplerParams& params, Rng& rng,
                 NodeCounter& counter, double weight, const OsObserver* observer)
      : view_(view), g_(view.tree()), t_(t), params_(params), rng_(rng), counter_(counter),
        weight_(weight), observer_(observer),
        sample_(static_cast<std::size_t>(g_.max_branching())),
        values_(static_cast<std::size_t>(g_.max_depth() + 1) * static_cast<std::size_t>(g_.max_branching())) {}

  void run(Player p) {
    player_ = p;
    steps_ = 0;
    sample(g_.root(), 1.0, 1.0);
  }

 private:
  int pick(std::span<const double> probs) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    double acc = 0.0;
    int last = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] <= 0.0) continue;
      last = static_cast<int>(i);
      acc += probs[i];
      if (u < acc) return last;
    }
    return last;
  }

  // chance_reach: product of chance probabilities; sample_self: the updating
  // player's sampling reach. Returns an unbiased estimate of the updating
  // player's value at h under the current profile.
  double sample(NodeId h, double chance_reach, double sample_self) {
    counter_.count_visit(NodeCategory::RegretMin);
    if (++steps_ > g_.max_depth() + 1) throw StructuralError("trajectory exceeds the game horizon");
    const Player owner = g_.owner(h);
    if (owner == Player::Terminal) {
      const double u = g_.payoff_p1(h);
      return player_ == Player::P1 ? u : -u;
    }
    auto acts = view_.actions(h);
    const std::size_t n = acts.size();
    if (owner == Player::Chance) {
      for (std::size_t i = 0; i < n; ++i) sample_[i] = g_.chance_probability(g_.child(h, acts[i]));
      const int i = pick({sample_.data(), n});
      const NodeId c = g_.child(h, acts[i]);
      return sample(c, chance_reach * g_.chance_probability(c), sample_self);
    }
    const InfosetId s = g_.infoset(h);
    if (n == 0) throw StructuralError("infostate with no allowed actions: " + g_.infoset_info(s).key);
    const std::size_t off = g_.infoset_info(s).action_offset;
    detail::refresh_infoset(view_.population(), g_, t_, s);
    const double* pi = t_.current.data() + off;

    if (owner != player_) {
      for (std::size_t i = 0; i < n; ++i) sample_[i] = pi[acts[i]];
      // Average-strategy estimate for the non-updating player.
      const double scale = weight_ / (chance_reach * sample_self);
      for (auto a : acts) {
        t_.strategy_sum[off + a] += scale * pi[a];
        t_.total_strategy_sum[off + a] += scale * pi[a];
      }
      const int i = pick({sample_.data(), n});
      return sample(g_.child(h, acts[i]), chance_reach, sample_self);
    }

    const double eps = params_.explore();
    for (std::size_t i = 0; i < n; ++i) sample_[i] = (1.0 - eps) * pi[acts[i]] + eps / static_cast<double>(n);
    const int i = pick({sample_.data(), n});
    const double q = sample_[i];
    const double child = sample(g_.child(h, acts[i]), chance_reach, sample_self * q);

    // One slot per depth, so deeper frames never clobber these values.
    std::span<double> vals(values_.data() + static_cast<std::size_t>(g_.node(h).depth) * g_.max_branching(), n);
    std::fill(vals.begin(), vals.end(), 0.0);
    vals[i] = child / q;
    const double v = pi[acts[i]] * vals[i];
    const double cf_scale = 1.0 / sample_self;
    for (std::size_t j = 0; j < n; ++j) t_.regrets[off + acts[j]] += weight_ * cf_scale * (vals[j] - v);
    if (observer_ && *observer_) {
      for (auto& x : vals) x *= cf_scale;
      (*observer_)(OsUpdate{player_, s, h, v * cf_scale, acts, {vals.data(), n}});
    }
    detail::refresh_infoset(view_.population(), g_, t_, s);
    return v;
  }

  const GameView& view_;
  const GameTree& g_;
  ProfileTables& t_;
  const SamplerParams& params_;
  Rng& rng_;
  NodeCounter& counter_;
  double weight_;
  const OsObserver* observer_;
  Player player_ = Player::P1;
  int steps_ = 0;
  std::vector<double> sample_;
  std::vector<double> values_;
};

}  // namespace detail

// One outcome-sampling episode: a sampled trajectory updating P1, then one
// updating P2. At the updating player's nodes actions are drawn from
// (1 - explore) * current + explore * uniform; elsewhere from the current
// policy and chance. Regret increments are importance weighted by the inverse
// sampling reach of the updating player.
inline void mccfr_episode(const GameView& view, ProfileTables& tables, const SamplerParams& params, Rng& rng,
                          NodeCounter& counter, double weight = 1.0, const OsObserver* observer = nullptr) {
  detail::OutcomeSampler sampler(view, tables, params, rng, counter, weight, observer);
  sampler.run(Player::P1);
  sampler.run(Player::P2);
}

}  // namespace rmdo
