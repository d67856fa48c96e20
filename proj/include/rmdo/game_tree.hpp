#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace rmdo {

// Raised when a history, infostate or tree shape is malformed.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid run or game configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an operation is called outside its precondition.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class Player : std::uint8_t { P1 = 0, P2 = 1, Chance = 2, Terminal = 3 };

inline constexpr std::array<Player, 2> kDecisionPlayers{Player::P1, Player::P2};

inline constexpr int index_of(Player p) { return static_cast<int>(p); }
inline constexpr Player opponent_of(Player p) {
  return p == Player::P1 ? Player::P2 : Player::P1;
}
inline const char* to_string(Player p) {
  switch (p) {
    case Player::P1: return "P1";
    case Player::P2: return "P2";
    case Player::Chance: return "chance";
    case Player::Terminal: return "terminal";
  }
  return "?";
}

using NodeId = std::uint32_t;
using InfosetId = std::int32_t;
inline constexpr InfosetId kNoInfoset = -1;

//------------------------------------------------------------------------------
// Visited-node accounting. Benchmarks report regret_min + best_response only;
// the evaluation bucket absorbs everything done purely for reporting.
//------------------------------------------------------------------------------
enum class NodeCategory : std::uint8_t { RegretMin, BestResponse, Evaluation };

struct NodeCounter {
  std::uint64_t regret_min = 0;
  std::uint64_t best_response = 0;
  std::uint64_t evaluation = 0;

  void count_visit(NodeCategory c, std::uint64_t n = 1) {
    switch (c) {
      case NodeCategory::RegretMin: regret_min += n; break;
      case NodeCategory::BestResponse: best_response += n; break;
      case NodeCategory::Evaluation: evaluation += n; break;
    }
  }
  std::uint64_t reported() const { return regret_min + best_response; }
  friend bool operator==(const NodeCounter&, const NodeCounter&) = default;
};

inline NodeCounter count_visit(NodeCounter counter, NodeCategory c) {
  counter.count_visit(c);
  return counter;
}

//------------------------------------------------------------------------------
// Rules concept: a game is described by a value-type state and pure transition
// functions. build_tree() expands it into an immutable GameTree.
//------------------------------------------------------------------------------
template <typename R>
concept GameRules = requires(const R& r, const typename R::State& s, int a) {
  typename R::State;
  { r.initial() } -> std::convertible_to<typename R::State>;
  { r.current_player(s) } -> std::convertible_to<Player>;
  { r.num_actions(s) } -> std::convertible_to<int>;
  { r.apply(s, a) } -> std::convertible_to<typename R::State>;
  { r.chance_probability(s, a) } -> std::convertible_to<double>;
  { r.payoff_p1(s) } -> std::convertible_to<double>;
  { r.infoset_key(s) } -> std::convertible_to<std::string>;
  { r.action_label(s, a) } -> std::convertible_to<std::string>;
};

struct InfosetInfo {
  Player player = Player::P1;
  std::string key;
  int num_actions = 0;
  std::size_t action_offset = 0;  // into flat per-(infoset, action) tables
  std::vector<std::string> labels;
  std::vector<NodeId> members;    // histories of this infostate, in node order
};

// Immutable two-player zero-sum extensive-form game, expanded from rules into a
// flat node arena. Children of a node are stored contiguously, so a history is
// identified by its NodeId and its action path can be recovered via parents.
class GameTree {
 public:
  struct Node {
    NodeId parent = 0;
    NodeId first_child = 0;
    std::uint16_t num_actions = 0;
    std::uint16_t depth = 0;          // number of edges from the root
    std::uint16_t action_from_parent = 0;
    Player owner = Player::Terminal;
    InfosetId infoset = kNoInfoset;
  };

  const std::string& name() const { return name_; }
  NodeId root() const { return 0; }
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_terminals() const { return num_terminals_; }
  const Node& node(NodeId h) const { return nodes_.at(h); }

  Player owner(NodeId h) const { return nodes_[h].owner; }
  bool is_terminal(NodeId h) const { return nodes_[h].owner == Player::Terminal; }
  bool is_chance(NodeId h) const { return nodes_[h].owner == Player::Chance; }
  InfosetId infoset(NodeId h) const { return nodes_[h].infoset; }
  int num_actions(NodeId h) const { return nodes_[h].num_actions; }

  NodeId child(NodeId h, int a) const {
    const Node& n = nodes_[h];
    return n.first_child + static_cast<NodeId>(a);
  }

  // Probability of the edge entering `h` when its parent is a chance node.
  double chance_probability(NodeId h) const { return edge_prob_[h]; }

  std::vector<int> legal_actions(NodeId h) const {
    check_node(h);
    std::vector<int> out(nodes_[h].num_actions);
    for (int a = 0; a < static_cast<int>(out.size()); ++a) out[a] = a;
    return out;
  }

  std::vector<std::pair<int, double>> chance_outcomes(NodeId h) const {
    check_node(h);
    if (!is_chance(h))
      throw ContractError("chance_outcomes called on a non-chance node");
    std::vector<std::pair<int, double>> out;
    out.reserve(nodes_[h].num_actions);
    for (int a = 0; a < nodes_[h].num_actions; ++a)
      out.emplace_back(a, edge_prob_[child(h, a)]);
    return out;
  }

  double payoff(NodeId z, Player i) const {
    check_node(z);
    if (!is_terminal(z)) throw ContractError("payoff requested at a non-terminal history");
    if (i == Player::Chance || i == Player::Terminal)
      throw ContractError("payoff requested for a non-decision player");
    return i == Player::P1 ? payoff_p1_[z] : -payoff_p1_[z];
  }
  // Unchecked P1 payoff, for inner loops.
  double payoff_p1(NodeId z) const { return payoff_p1_[z]; }

  std::vector<int> path(NodeId h) const {
    check_node(h);
    std::vector<int> p(nodes_[h].depth);
    for (NodeId cur = h; cur != root(); cur = nodes_[cur].parent)
      p[nodes_[cur].depth - 1] = nodes_[cur].action_from_parent;
    return p;
  }

  NodeId find(std::span<const int> path) const {
    NodeId h = root();
    for (int a : path) {
      if (a < 0 || a >= nodes_[h].num_actions)
        throw StructuralError("action path does not exist in game '" + name_ + "'");
      h = child(h, a);
    }
    return h;
  }

  // Infostates are numbered globally across both players.
  std::size_t num_infosets() const { return infosets_.size(); }
  std::size_t num_infosets(Player p) const { return num_infosets_[index_of(p)]; }
  const InfosetInfo& infoset_info(InfosetId s) const { return infosets_.at(s); }
  const std::vector<InfosetInfo>& infosets() const { return infosets_; }
  const std::vector<InfosetId>& infosets_of(Player p) const { return by_player_.at(index_of(p)); }
  std::size_t total_actions() const { return total_actions_; }
  InfosetId find_infoset(const std::string& key) const {
    auto it = infoset_index_.find(key);
    return it == infoset_index_.end() ? kNoInfoset : it->second;
  }

  std::string action_label(NodeId h, int a) const {
    InfosetId s = infoset(h);
    if (s == kNoInfoset) return "chance:" + std::to_string(a);
    return infosets_[s].labels.at(a);
  }

  // Max number of edges on a root-to-terminal path, and max decision nodes.
  int max_depth() const { return max_depth_; }
  int horizon() const { return horizon_; }
  int horizon(Player p) const { return player_horizon_[index_of(p)]; }
  int max_branching() const { return max_branching_; }
  double utility_min() const { return u_min_; }
  double utility_max() const { return u_max_; }

 private:
  template <GameRules R>
  friend GameTree build_tree(const R& rules, std::string name);

  void check_node(NodeId h) const {
    if (h >= nodes_.size()) throw StructuralError("unknown history id " + std::to_string(h));
  }

  std::string name_;
  std::vector<Node> nodes_;
  std::vector<double> edge_prob_;
  std::vector<double> payoff_p1_;
  std::vector<InfosetInfo> infosets_;
  std::unordered_map<std::string, InfosetId> infoset_index_;
  std::array<std::size_t, 2> num_infosets_{0, 0};
  std::array<std::vector<InfosetId>, 2> by_player_;
  std::size_t total_actions_ = 0;
  std::size_t num_terminals_ = 0;
  int max_depth_ = 0;
  int horizon_ = 0;
  std::array<int, 2> player_horizon_{0, 0};
  int max_branching_ = 0;
  double u_min_ = std::numeric_limits<double>::infinity();
  double u_max_ = -std::numeric_limits<double>::infinity();
};

template <GameRules R>
GameTree build_tree(const R& rules, std::string name) {
  using State = typename R::State;
  GameTree t;
  t.name_ = std::move(name);
  t.nodes_.emplace_back();
  t.edge_prob_.push_back(1.0);
  t.payoff_p1_.push_back(0.0);

  struct Frame {
    NodeId id;
    State state;
    int decisions;
    std::array<int, 2> own;
  };
  std::vector<Frame> stack;
  stack.push_back({0, rules.initial(), 0, {0, 0}});

  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    const Player p = rules.current_player(f.state);
    t.nodes_[f.id].owner = p;
    t.max_depth_ = std::max<int>(t.max_depth_, t.nodes_[f.id].depth);

    if (p == Player::Terminal) {
      double u = rules.payoff_p1(f.state);
      t.payoff_p1_[f.id] = u;
      t.u_min_ = std::min({t.u_min_, u, -u});
      t.u_max_ = std::max({t.u_max_, u, -u});
      ++t.num_terminals_;
      t.horizon_ = std::max(t.horizon_, f.decisions);
      for (int i = 0; i < 2; ++i) t.player_horizon_[i] = std::max(t.player_horizon_[i], f.own[i]);
      continue;
    }

    const int n = rules.num_actions(f.state);
    if (n <= 0) throw StructuralError("non-terminal state without actions in " + t.name_);
    if (n > std::numeric_limits<std::uint16_t>::max())
      throw StructuralError("too many actions at one node");
    t.max_branching_ = std::max(t.max_branching_, n);

    if (p == Player::P1 || p == Player::P2) {
      std::string key = rules.infoset_key(f.state);
      auto [it, inserted] = t.infoset_index_.try_emplace(key, static_cast<InfosetId>(t.infosets_.size()));
      if (inserted) {
        InfosetInfo info;
        info.player = p;
        info.key = key;
        info.num_actions = n;
        info.action_offset = t.total_actions_;
        info.labels.reserve(n);
        for (int a = 0; a < n; ++a) info.labels.push_back(rules.action_label(f.state, a));
        t.total_actions_ += n;
        t.by_player_[index_of(p)].push_back(static_cast<InfosetId>(t.infosets_.size()));
        t.infosets_.push_back(std::move(info));
        ++t.num_infosets_[index_of(p)];
      }
      InfosetInfo& info = t.infosets_[it->second];
      if (info.player != p || info.num_actions != n)
        throw StructuralError("infostate '" + key + "' has inconsistent owner or action count");
      info.members.push_back(f.id);
      t.nodes_[f.id].infoset = it->second;
    }

    const NodeId first = static_cast<NodeId>(t.nodes_.size());
    t.nodes_[f.id].first_child = first;
    t.nodes_[f.id].num_actions = static_cast<std::uint16_t>(n);
    double mass = 0.0;
    for (int a = 0; a < n; ++a) {
      GameTree::Node c;
      c.parent = f.id;
      c.depth = static_cast<std::uint16_t>(t.nodes_[f.id].depth + 1);
      c.action_from_parent = static_cast<std::uint16_t>(a);
      t.nodes_.push_back(c);
      double prob = 1.0;
      if (p == Player::Chance) {
        prob = rules.chance_probability(f.state, a);
        if (!(prob > 0.0)) throw StructuralError("chance outcome with non-positive probability");
        mass += prob;
      }
      t.edge_prob_.push_back(prob);
      t.payoff_p1_.push_back(0.0);
    }
    if (p == Player::Chance && std::abs(mass - 1.0) > 1e-12)
      throw StructuralError("chance probabilities do not sum to one");

    // Reverse push keeps the DFS visiting action 0 first.
    for (int a = n - 1; a >= 0; --a) {
      Frame c{first + static_cast<NodeId>(a), rules.apply(f.state, a), f.decisions, f.own};
      if (p != Player::Chance) {
        ++c.decisions;
        ++c.own[index_of(p)];
      }
      stack.push_back(std::move(c));
    }
  }
  // Members were discovered in DFS order; sort so enumeration is node-ordered.
  for (auto& info : t.infosets_) std::sort(info.members.begin(), info.members.end());
  return t;
}

//------------------------------------------------------------------------------
// Enumeration-based structural checks. Used by tests and `enumerate`.
//------------------------------------------------------------------------------
struct TreeCheckReport {
  bool zero_sum = true;
  bool chance_normalized = true;
  bool perfect_recall = true;
  std::string detail;
  bool ok() const { return zero_sum && chance_normalized && perfect_recall; }
};

// Sequence of (infoset, action) pairs the owner of `h` took before reaching h.
inline std::vector<std::pair<InfosetId, int>> own_sequence(const GameTree& g, NodeId h, Player p) {
  std::vector<std::pair<InfosetId, int>> seq;
  for (NodeId cur = h; cur != g.root();) {
    NodeId parent = g.node(cur).parent;
    if (g.owner(parent) == p) seq.emplace_back(g.infoset(parent), g.node(cur).action_from_parent);
    cur = parent;
  }
  std::reverse(seq.begin(), seq.end());
  return seq;
}

inline TreeCheckReport check_tree(const GameTree& g) {
  TreeCheckReport r;
  for (NodeId h = 0; h < g.num_nodes(); ++h) {
    if (g.is_terminal(h)) {
      double s = g.payoff(h, Player::P1) + g.payoff(h, Player::P2);
      if (std::abs(s) >= 1e-12) {
        r.zero_sum = false;
        r.detail = "non-zero-sum terminal";
      }
    } else if (g.is_chance(h)) {
      double mass = 0.0;
      for (auto [a, p] : g.chance_outcomes(h)) mass += p;
      if (std::abs(mass - 1.0) > 1e-12) {
        r.chance_normalized = false;
        r.detail = "chance node not normalized";
      }
    }
  }
  for (InfosetId s = 0; s < static_cast<InfosetId>(g.num_infosets()); ++s) {
    const auto& info = g.infoset_info(s);
    auto ref = own_sequence(g, info.members.front(), info.player);
    for (NodeId h : info.members) {
      if (own_sequence(g, h, info.player) != ref) {
        r.perfect_recall = false;
        r.detail = "perfect recall violated at " + info.key;
        break;
      }
    }
  }
  return r;
}

}  // namespace rmdo
