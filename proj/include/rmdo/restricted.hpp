#pragma once

#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rmdo/evaluation.hpp"
#include "rmdo/game_tree.hpp"
#include "rmdo/policy.hpp"
#include "rmdo/population.hpp"
#include "rmdo/regret.hpp"

namespace rmdo {

using ActionPair = std::pair<InfosetId, int>;

// Adds the pure choice of `br` at every infostate of its player.
inline std::vector<ActionPair> add_pure_policy(Population& pop, const BestResponseResult& br) {
  std::vector<ActionPair> added;
  const GameTree& g = pop.tree();
  for (InfosetId s : g.infosets_of(br.responder)) {
    const int a = br.choice[s];
    if (a < 0) throw ContractError("best response is not complete at " + g.infoset_info(s).key);
    if (pop.add(s, a)) added.emplace_back(s, a);
  }
  return added;
}

// Best response of each player to the uniform profile, over the full game.
inline Population initial_population(const GameTree& g, NodeCounter& counter) {
  const GameView full = GameView::full(g);
  const TabularPolicy uniform = TabularPolicy::uniform(g);
  BestResponder br(full);
  Population pop = Population::empty(g);
  for (Player p : kDecisionPlayers) add_pure_policy(pop, br.compute(uniform, p, counter));
  return pop;
}

struct Expansion {
  Population population;
  bool changed = false;
  std::vector<ActionPair> added;
};

inline Expansion expand(const Population& pop, const BestResponseResult& br1, const BestResponseResult& br2) {
  Expansion e{pop, false, {}};
  for (const auto* br : {&br1, &br2}) {
    auto a = add_pure_policy(e.population, *br);
    e.added.insert(e.added.end(), a.begin(), a.end());
  }
  e.changed = !e.added.empty();
  return e;
}

//------------------------------------------------------------------------------
// Warm start
//------------------------------------------------------------------------------

struct WarmStartMode {
  enum class Kind { Reset, Carry } kind = Kind::Reset;
  double eps_init = 1e-6;
  bool zero_accumulator = false;  // carry regrets only

  static WarmStartMode reset() { return {}; }
  static WarmStartMode carry(double eps_init = 1e-6, bool zero_accumulator = false) {
    if (!(eps_init > 0.0)) throw ContractError("eps_init must be positive when carrying");
    return {Kind::Carry, eps_init, zero_accumulator};
  }
  bool carrying() const { return kind == Kind::Carry; }
};

// Tables for the expanded restricted game. The overall accumulator is never
// touched: new actions join it with zero mass.
inline ProfileTables warm_start(const ProfileTables& prev, const Population& prev_pop,
                                const std::vector<ActionPair>& added, const WarmStartMode& mode) {
  const GameTree& g = prev_pop.tree();
  for (const auto& [s, a] : added)
    if (prev_pop.contains(s, a))
      throw ContractError("pair already in the previous restricted game: " + g.infoset_info(s).key + " action " +
                          std::to_string(a));
  ProfileTables t = prev;
  if (!mode.carrying()) {
    std::fill(t.regrets.begin(), t.regrets.end(), 0.0);
    std::fill(t.strategy_sum.begin(), t.strategy_sum.end(), 0.0);
    return t;
  }
  if (mode.zero_accumulator) std::fill(t.strategy_sum.begin(), t.strategy_sum.end(), 0.0);
  for (const auto& [s, a] : added) {
    const std::size_t i = g.infoset_info(s).action_offset + a;
    t.regrets[i] = mode.eps_init;
    if (!mode.zero_accumulator) t.strategy_sum[i] = mode.eps_init;
  }
  return t;
}

//------------------------------------------------------------------------------
// Text snapshot: one line per listed infostate, "<key>\t<a0>,<a1>,..."
//------------------------------------------------------------------------------

inline void write_population(std::ostream& os, const Population& pop) {
  const GameTree& g = pop.tree();
  for (InfosetId s = 0; s < static_cast<InfosetId>(g.num_infosets()); ++s) {
    auto allowed = pop.allowed(s);
    if (allowed.empty()) continue;
    os << g.infoset_info(s).key << '\t';
    for (std::size_t i = 0; i < allowed.size(); ++i) os << (i ? "," : "") << allowed[i];
    os << '\n';
  }
}

inline Population read_population(std::istream& is, const GameTree& g) {
  Population pop = Population::empty(g);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos)
      throw StructuralError("population line " + std::to_string(lineno) + ": missing tab");
    const InfosetId s = g.find_infoset(line.substr(0, tab));
    if (s == kNoInfoset)
      throw StructuralError("population line " + std::to_string(lineno) + ": unknown infostate");
    std::stringstream acts(line.substr(tab + 1));
    std::string tok;
    while (std::getline(acts, tok, ',')) {
      try {
        pop.add(s, std::stoi(tok));
      } catch (const std::invalid_argument&) {
        throw StructuralError("population line " + std::to_string(lineno) + ": bad action '" + tok + "'");
      }
    }
  }
  return pop;
}

}  // namespace rmdo
