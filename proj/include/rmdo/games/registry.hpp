#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmdo/game_tree.hpp"
#include "rmdo/games/blotto.hpp"
#include "rmdo/games/kuhn.hpp"
#include "rmdo/games/leduc.hpp"
#include "rmdo/games/oshi_zumo.hpp"

namespace rmdo {

struct GameConfig {
  std::string name;
  std::map<std::string, long long> params;
};

namespace games {

inline const std::vector<std::string>& game_names() {
  static const std::vector<std::string> names{"kuhn",    "large_kuhn", "leduc",    "leduc_dummy",
                                              "leduc10", "blotto",     "oshi_zumo"};
  return names;
}

// Default parameters per game; the key set doubles as the list of accepted keys.
inline std::map<std::string, long long> default_params(const std::string& name) {
  if (name == "kuhn") return {{"cards", 3}, {"stack", 2}};
  if (name == "large_kuhn") return {{"cards", 3}, {"stack", 40}};
  if (name == "leduc" || name == "leduc_dummy")
    return {{"ranks", 3}, {"raise1", 2}, {"raise2", 4}, {"max_raises", 2}};
  if (name == "leduc10") return {{"ranks", 5}, {"raise1", 2}, {"raise2", 4}, {"max_raises", 2}};
  if (name == "blotto") return {{"forces", 20}, {"deployments", 4}, {"outcome", 1}};
  if (name == "oshi_zumo") return {{"coins", 4}, {"k", 6}, {"scoring", 1}};
  throw ConfigError("unknown game '" + name + "'");
}

inline std::map<std::string, long long> resolve_params(const GameConfig& cfg) {
  auto params = default_params(cfg.name);
  for (const auto& [key, value] : cfg.params) {
    if (!params.count(key))
      throw ConfigError("game '" + cfg.name + "' has no parameter '" + key + "'");
    if (value <= 0) throw ConfigError("parameter '" + key + "' must be positive");
    params[key] = value;
  }
  return params;
}

}  // namespace games

inline GameTree build_game(const GameConfig& cfg) {
  const auto p = games::resolve_params(cfg);
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(cfg.name + ": " + what);
  };

  if (cfg.name == "kuhn" || cfg.name == "large_kuhn") {
    games::KuhnRules r;
    r.cards = static_cast<int>(p.at("cards"));
    r.stack = static_cast<int>(p.at("stack"));
    need(r.cards >= 2, "cards must be at least 2");
    need(r.stack >= 2 && r.stack <= 1000, "stack must be in [2, 1000]");
    return build_tree(r, cfg.name);
  }
  if (cfg.name == "leduc" || cfg.name == "leduc10" || cfg.name == "leduc_dummy") {
    games::LeducRules r;
    r.ranks = static_cast<int>(p.at("ranks"));
    r.raise_sizes[0] = static_cast<int>(p.at("raise1"));
    r.raise_sizes[1] = static_cast<int>(p.at("raise2"));
    r.max_raises = static_cast<int>(p.at("max_raises"));
    r.duplicate = cfg.name == "leduc_dummy" ? 2 : 1;
    need(r.ranks >= 2 && r.ranks <= 13, "ranks must be in [2, 13]");
    need(r.max_raises <= 4, "max_raises must be at most 4");
    return build_tree(r, cfg.name);
  }
  if (cfg.name == "blotto") {
    games::BlottoRules r;
    r.forces = static_cast<int>(p.at("forces"));
    r.deployments = static_cast<int>(p.at("deployments"));
    need(r.forces <= 64, "forces must be at most 64");
    need(r.deployments % 2 == 0, "deployments must be even");
    need(r.deployments <= r.forces, "deployments cannot exceed forces");
    const auto o = p.at("outcome");
    need(o == 1 || o == 2, "outcome must be 1 (difference) or 2 (sign)");
    r.outcome = static_cast<games::BlottoRules::Outcome>(o);
    return build_tree(r, cfg.name);
  }
  if (cfg.name == "oshi_zumo") {
    games::OshiZumoRules r;
    r.coins = static_cast<int>(p.at("coins"));
    r.k = static_cast<int>(p.at("k"));
    need(r.coins <= 12, "coins must be at most 12");
    const auto sc = p.at("scoring");
    need(sc == 1 || sc == 2, "scoring must be 1 (edge) or 2 (side)");
    r.scoring = static_cast<games::OshiZumoRules::Scoring>(sc);
    return build_tree(r, cfg.name);
  }
  throw ConfigError("unknown game '" + cfg.name + "'");
}

}  // namespace rmdo
