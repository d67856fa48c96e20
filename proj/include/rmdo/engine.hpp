#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <istream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rmdo/evaluation.hpp"
#include "rmdo/game_tree.hpp"
#include "rmdo/policy.hpp"
#include "rmdo/population.hpp"
#include "rmdo/regret.hpp"
#include "rmdo/restricted.hpp"
#include "rmdo/schedule.hpp"

namespace rmdo {

enum class SolverKind { Cfr, Lcfr, Mccfr };

inline const char* solver_name(SolverKind k) {
  switch (k) {
    case SolverKind::Cfr: return "cfr";
    case SolverKind::Lcfr: return "lcfr";
    case SolverKind::Mccfr: return "mccfr";
  }
  return "?";
}

inline std::optional<SolverKind> parse_solver(const std::string& s) {
  for (auto k : {SolverKind::Cfr, SolverKind::Lcfr, SolverKind::Mccfr})
    if (s == solver_name(k)) return k;
  return std::nullopt;
}

// Checked in order: node budget, target exploitability, iterations. Zero disables.
struct StopCondition {
  std::uint64_t node_budget = 0;
  double target_exploitability = 0.0;
  std::uint64_t max_iterations = 0;
  bool any() const { return node_budget > 0 || target_exploitability > 0.0 || max_iterations > 0; }
};

struct LogCadence {
  enum class Kind { Geometric, Iterations, Nodes } kind = Kind::Geometric;
  double ratio = 1.25;      // geometric: log when nodes_reported grows by this factor
  std::uint64_t every = 1;  // iterations or nodes between records
  bool exploitability = true;
  bool oas = false;
  bool wall_time = false;  // off keeps metrics byte-reproducible
};

struct EngineConfig {
  SolverKind solver = SolverKind::Cfr;
  Schedule schedule;
  WarmStartMode warm_start;
  std::uint64_t seed = 0;
  double explore = 0.6;
  StopCondition stop;
  LogCadence log;
};

inline void validate(const EngineConfig& c) {
  if (c.schedule.stochastic() && c.solver != SolverKind::Mccfr)
    throw ConfigError(std::string(schedule_name(c.schedule.kind)) + " requires the mccfr solver");
  if (!c.stop.any()) throw ConfigError("no stop condition: set a node budget, target or iteration cap");
  if (c.stop.target_exploitability < 0.0) throw ConfigError("target exploitability must be non-negative");
  if (c.stop.target_exploitability > 0.0 && !c.log.exploitability)
    throw ConfigError("a target exploitability needs exploitability logging");
  if (!(c.explore > 0.0 && c.explore <= 1.0)) throw ConfigError("explore must lie in (0, 1]");
  if (c.log.kind == LogCadence::Kind::Geometric && !(c.log.ratio > 1.0))
    throw ConfigError("geometric log ratio must exceed 1");
  if (c.log.kind != LogCadence::Kind::Geometric && c.log.every == 0) throw ConfigError("log every must be positive");
  if (c.warm_start.carrying() && !(c.warm_start.eps_init > 0.0)) throw ConfigError("eps_init must be positive");
  const Schedule& s = c.schedule;
  switch (s.kind) {
    case ScheduleKind::Pdo:
    case ScheduleKind::Spdo:
      if (s.c == 0) throw ConfigError("periodicity c must be positive");
      break;
    case ScheduleKind::Xdo:
      if (!(s.eps0 > 0.0)) throw ConfigError("xdo eps0 must be positive");
      if (s.check_every == 0) throw ConfigError("xdo check_every must be positive");
      break;
    case ScheduleKind::Adado:
    case ScheduleKind::Sado:
      if (!(s.alpha > 0.0 && s.alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
      if (!(s.target_eps > 0.0) && !(c.stop.target_exploitability > 0.0))
        throw ConfigError(std::string(schedule_name(s.kind)) + " needs target_eps or a stop target");
      if (s.early_stop.enabled && (s.early_stop.every == 0 || !(s.early_stop.delta > 0.0)))
        throw ConfigError("early stop needs positive delta and every");
      break;
    default: break;
  }
}

struct MetricsRecord {
  std::uint64_t iteration = 0;
  std::uint64_t nodes_rm = 0;
  std::uint64_t nodes_br = 0;
  std::uint64_t nodes_eval = 0;
  std::uint64_t nodes_reported = 0;
  std::optional<double> exploitability_las;
  std::optional<double> exploitability_oas;
  int window_j = 0;
  std::size_t sum_infosets = 0;
  std::size_t population_size = 0;
  double wall_ms = 0.0;
};

enum class EventKind { LocalCheck, BrCheck };

struct WindowEvent {
  std::uint64_t iteration = 0;
  EventKind kind = EventKind::BrCheck;
  int j = 0;  // window in which the event happened
  std::optional<double> local_e;
  std::optional<double> threshold;
  bool changed = false;
  std::size_t added = 0;
  std::size_t population_size = 0;  // after the event
  std::size_t sum_infosets = 0;     // after the event
  std::uint64_t next_m = 0;         // check frequency in force after the event
};

struct RunLog {
  std::vector<MetricsRecord> records;
  std::vector<WindowEvent> events;
};

enum class StopReason { Running, NodeBudget, Target, Iterations };

inline const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::Running: return "running";
    case StopReason::NodeBudget: return "node_budget";
    case StopReason::Target: return "target";
    case StopReason::Iterations: return "iterations";
  }
  return "?";
}

struct RunResult {
  TabularPolicy las;
  RunLog log;
  StopReason reason = StopReason::Running;
};

class Engine {
 public:
  Engine(const GameTree& g, EngineConfig cfg)
      : g_(&g), cfg_(std::move(cfg)), full_(GameView::full(g)), view_(full_), tables_(ProfileTables::zeros(g)),
        rng_(cfg_.seed), start_(std::chrono::steady_clock::now()) {
    validate(cfg_);
    if (cfg_.schedule.double_oracle())
      pop_ = std::make_shared<const Population>(initial_population(g, counter_));
    else
      pop_ = full_.population_ptr();
    start_window();
  }

  // Resumes from a snapshot written by save() with the same game and config.
  static Engine load(const GameTree& g, EngineConfig cfg, std::istream& is);

  const EngineConfig& config() const { return cfg_; }
  const GameTree& tree() const { return *g_; }
  const Population& population() const { return *pop_; }
  const GameView& view() const { return view_; }
  const ProfileTables& tables() const { return tables_; }
  const NodeCounter& counter() const { return counter_; }
  const RunLog& log() const { return log_; }
  const RestrictedStats& stats() const { return stats_; }
  int window() const { return j_; }
  std::uint64_t iteration() const { return iteration_; }
  std::uint64_t check_frequency() const { return m_; }
  StopReason stop_reason() const { return stop_; }
  bool stopped() const { return stop_ != StopReason::Running; }

  // Last-window average: the window accumulator normalized over the population.
  TabularPolicy las() const { return average_policy(*pop_, tables_.strategy_sum).policy; }
  // Overall average: the accumulator that is never reset.
  TabularPolicy oas() const { return average_policy(*pop_, tables_.total_strategy_sum).policy; }

  // One regret-minimization iteration followed by the schedule's checks,
  // logging and stop tests. Returns false once stopped.
  bool step() {
    if (stopped()) return false;
    ++iteration_;
    ++iter_in_window_;
    ++since_check_;
    ++table_iters_;
    switch (cfg_.solver) {
      case SolverKind::Cfr: cfr_iteration(view_, tables_, 1.0, counter_); break;
      case SolverKind::Lcfr: cfr_iteration(view_, tables_, static_cast<double>(table_iters_), counter_); break;
      case SolverKind::Mccfr: {
        const SamplerParams params(cfg_.explore, cfg_.seed);
        mccfr_episode(view_, tables_, params, rng_, counter_);
        break;
      }
    }
    after_iteration();
    const bool logged = maybe_log();
    check_stop(logged);
    return !stopped();
  }

  RunResult run() {
    while (step()) {
    }
    return {las(), log_, stop_};
  }

  void save(std::ostream& os) const;

 private:
  struct NoInit {};
  Engine(const GameTree& g, EngineConfig cfg, NoInit)
      : g_(&g), cfg_(std::move(cfg)), full_(GameView::full(g)), view_(full_), tables_(ProfileTables::zeros(g)),
        rng_(cfg_.seed), start_(std::chrono::steady_clock::now()) {
    validate(cfg_);
  }

  double schedule_eps() const {
    return cfg_.schedule.target_eps > 0.0 ? cfg_.schedule.target_eps : cfg_.stop.target_exploitability;
  }

  void start_window() {
    view_ = GameView(*g_, pop_);
    NodeCounter scratch;
    NodeCounter& charge = cfg_.schedule.kind == ScheduleKind::Adado ? scratch : counter_;
    const NodeCategory cat = cfg_.schedule.stochastic() ? NodeCategory::BestResponse : NodeCategory::Evaluation;
    stats_ = restricted_stats(view_, charge, cat);
    stats_.window = j_;
    m_ = next_check(cfg_.schedule, stats_, schedule_eps());
    iter_in_window_ = 0;
    since_check_ = 0;
    prev_local_.reset();
  }

  double local_exploitability() { return exploitability(view_, las(), counter_, NodeCategory::BestResponse); }

  void after_iteration() {
    const Schedule& s = cfg_.schedule;
    switch (s.kind) {
      case ScheduleKind::None: return;
      case ScheduleKind::Xdo: {
        if (since_check_ < s.check_every) return;
        since_check_ = 0;
        const double e = local_exploitability();
        const double thr = xdo_threshold(s.eps0, j_);
        push_event(EventKind::LocalCheck, e, thr, false, 0);
        if (xdo_should_expand(e, s.eps0, j_)) br_check(e, thr);
        return;
      }
      case ScheduleKind::Adado:
      case ScheduleKind::Sado: {
        if (since_check_ >= m_) {
          br_check(std::nullopt, std::nullopt);
          return;
        }
        if (!s.early_stop.enabled || iter_in_window_ % s.early_stop.every != 0) return;
        const double e = local_exploitability();
        push_event(EventKind::LocalCheck, e, std::nullopt, false, 0);
        if (early_stop_trigger(prev_local_, e, s.early_stop.delta))
          br_check(e, std::nullopt);
        else
          prev_local_ = e;
        return;
      }
      default:
        if (since_check_ >= m_) br_check(std::nullopt, std::nullopt);
        return;
    }
  }

  void br_check(std::optional<double> local_e, std::optional<double> threshold) {
    const TabularPolicy avg = las();
    BestResponder br(full_);
    const auto br1 = br.compute(avg, Player::P1, counter_, NodeCategory::BestResponse);
    const auto br2 = br.compute(avg, Player::P2, counter_, NodeCategory::BestResponse);
    Expansion ex = expand(*pop_, br1, br2);
    since_check_ = 0;
    prev_local_.reset();
    const int j_before = j_;
    if (ex.changed) {
      tables_ = warm_start(tables_, *pop_, ex.added, cfg_.warm_start);
      if (!cfg_.warm_start.carrying()) table_iters_ = 0;
      pop_ = std::make_shared<const Population>(std::move(ex.population));
      ++j_;
      start_window();
    }
    WindowEvent ev;
    ev.iteration = iteration_;
    ev.kind = EventKind::BrCheck;
    ev.j = j_before;
    ev.local_e = local_e;
    ev.threshold = threshold;
    ev.changed = ex.changed;
    ev.added = ex.added.size();
    ev.population_size = pop_->size();
    ev.sum_infosets = stats_.sum_infosets;
    ev.next_m = m_;
    log_.events.push_back(ev);
  }

  void push_event(EventKind kind, std::optional<double> e, std::optional<double> thr, bool changed,
                  std::size_t added) {
    log_.events.push_back(
        {iteration_, kind, j_, e, thr, changed, added, pop_->size(), stats_.sum_infosets, m_});
  }

  bool maybe_log() {
    const std::uint64_t reported = counter_.reported();
    bool due = false;
    switch (cfg_.log.kind) {
      case LogCadence::Kind::Geometric:
        if (static_cast<double>(reported) >= next_log_at_) {
          due = true;
          next_log_at_ = std::max(static_cast<double>(reported) * cfg_.log.ratio, static_cast<double>(reported) + 1.0);
        }
        break;
      case LogCadence::Kind::Iterations: due = iteration_ % cfg_.log.every == 0; break;
      case LogCadence::Kind::Nodes:
        if (reported >= next_log_nodes_) {
          due = true;
          next_log_nodes_ = (reported / cfg_.log.every + 1) * cfg_.log.every;
        }
        break;
    }
    if (due) emit_record();
    return due;
  }

  void emit_record() {
    MetricsRecord r;
    if (cfg_.log.exploitability) r.exploitability_las = exploitability(full_, las(), counter_);
    if (cfg_.log.oas) r.exploitability_oas = exploitability(full_, oas(), counter_);
    r.iteration = iteration_;
    r.nodes_rm = counter_.regret_min;
    r.nodes_br = counter_.best_response;
    r.nodes_eval = counter_.evaluation;
    r.nodes_reported = counter_.reported();
    r.window_j = j_;
    r.sum_infosets = stats_.sum_infosets;
    r.population_size = pop_->size();
    if (cfg_.log.wall_time)
      r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    log_.records.push_back(r);
  }

  void check_stop(bool logged) {
    const StopCondition& st = cfg_.stop;
    if (st.node_budget > 0 && counter_.reported() >= st.node_budget)
      stop_ = StopReason::NodeBudget;
    else if (st.target_exploitability > 0.0 && logged && log_.records.back().exploitability_las &&
             *log_.records.back().exploitability_las <= st.target_exploitability)
      stop_ = StopReason::Target;
    else if (st.max_iterations > 0 && iteration_ >= st.max_iterations)
      stop_ = StopReason::Iterations;
    if (stopped() && !logged) emit_record();
  }

  const GameTree* g_;
  EngineConfig cfg_;
  GameView full_;
  std::shared_ptr<const Population> pop_;
  GameView view_;
  ProfileTables tables_;
  NodeCounter counter_;
  Rng rng_;
  RestrictedStats stats_;
  RunLog log_;
  std::uint64_t iteration_ = 0;
  std::uint64_t iter_in_window_ = 0;
  std::uint64_t since_check_ = 0;
  std::uint64_t table_iters_ = 0;  // iterations accumulated into the current tables
  std::uint64_t m_ = 1;
  int j_ = 0;
  std::optional<double> prev_local_;
  double next_log_at_ = 0.0;
  std::uint64_t next_log_nodes_ = 0;
  StopReason stop_ = StopReason::Running;
  std::chrono::steady_clock::time_point start_;
};

//------------------------------------------------------------------------------
// Snapshot: whitespace-separated text, doubles in hexfloat so a resumed run
// continues bit-identically.
//------------------------------------------------------------------------------

namespace detail {

inline std::string hex(double x) {
  std::ostringstream os;
  os << std::hexfloat << x;
  return os.str();
}

inline std::string hex(const std::optional<double>& x) { return x ? hex(*x) : std::string("-"); }

class SnapshotReader {
 public:
  explicit SnapshotReader(std::istream& is) : is_(is) {}

  std::string word() {
    std::string w;
    if (!(is_ >> w)) throw StructuralError("snapshot truncated");
    return w;
  }
  void expect(const std::string& tag) {
    const std::string w = word();
    if (w != tag) throw StructuralError("snapshot: expected '" + tag + "', found '" + w + "'");
  }
  std::uint64_t u64() {
    const std::string w = word();
    char* end = nullptr;
    const auto v = std::strtoull(w.c_str(), &end, 10);
    if (*end) throw StructuralError("snapshot: bad integer '" + w + "'");
    return v;
  }
  double real() {
    const std::string w = word();
    char* end = nullptr;
    const double v = std::strtod(w.c_str(), &end);
    if (*end) throw StructuralError("snapshot: bad number '" + w + "'");
    return v;
  }
  std::optional<double> opt_real() {
    const std::string w = word();
    if (w == "-") return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(w.c_str(), &end);
    if (*end) throw StructuralError("snapshot: bad number '" + w + "'");
    return v;
  }
  std::istream& stream() { return is_; }

 private:
  std::istream& is_;
};

}  // namespace detail

inline void Engine::save(std::ostream& os) const {
  using detail::hex;
  os << "rmdo-snapshot 1\n";
  os << "counter " << counter_.regret_min << ' ' << counter_.best_response << ' ' << counter_.evaluation << '\n';
  os << "state " << iteration_ << ' ' << iter_in_window_ << ' ' << since_check_ << ' ' << table_iters_ << ' ' << m_
     << ' ' << j_ << ' ' << hex(prev_local_) << ' ' << hex(next_log_at_) << ' ' << next_log_nodes_ << ' '
     << static_cast<int>(stop_) << '\n';
  os << "stats " << stats_.sum_infosets << ' ' << stats_.max_branching << ' ' << stats_.horizon << ' '
     << stats_.num_histories << ' ' << stats_.window << '\n';
  os << "rng " << rng_ << '\n';
  std::ostringstream pop;
  write_population(pop, *pop_);
  const std::string pop_text = pop.str();
  os << "population " << pop_text.size() << '\n' << pop_text;
  os << "tables " << tables_.regrets.size() << '\n';
  for (const auto* v : {&tables_.regrets, &tables_.strategy_sum, &tables_.total_strategy_sum, &tables_.current}) {
    for (double x : *v) os << hex(x) << ' ';
    os << '\n';
  }
  os << "records " << log_.records.size() << '\n';
  for (const auto& r : log_.records)
    os << r.iteration << ' ' << r.nodes_rm << ' ' << r.nodes_br << ' ' << r.nodes_eval << ' ' << r.nodes_reported
       << ' ' << hex(r.exploitability_las) << ' ' << hex(r.exploitability_oas) << ' ' << r.window_j << ' '
       << r.sum_infosets << ' ' << r.population_size << ' ' << hex(r.wall_ms) << '\n';
  os << "events " << log_.events.size() << '\n';
  for (const auto& e : log_.events)
    os << e.iteration << ' ' << static_cast<int>(e.kind) << ' ' << e.j << ' ' << hex(e.local_e) << ' '
       << hex(e.threshold) << ' ' << e.changed << ' ' << e.added << ' ' << e.population_size << ' ' << e.sum_infosets
       << ' ' << e.next_m << '\n';
  os << "end\n";
}

inline Engine Engine::load(const GameTree& g, EngineConfig cfg, std::istream& is) {
  Engine e(g, std::move(cfg), NoInit{});
  detail::SnapshotReader in(is);
  in.expect("rmdo-snapshot");
  if (in.u64() != 1) throw StructuralError("unsupported snapshot version");
  in.expect("counter");
  e.counter_.regret_min = in.u64();
  e.counter_.best_response = in.u64();
  e.counter_.evaluation = in.u64();
  in.expect("state");
  e.iteration_ = in.u64();
  e.iter_in_window_ = in.u64();
  e.since_check_ = in.u64();
  e.table_iters_ = in.u64();
  e.m_ = in.u64();
  e.j_ = static_cast<int>(in.u64());
  e.prev_local_ = in.opt_real();
  e.next_log_at_ = in.real();
  e.next_log_nodes_ = in.u64();
  e.stop_ = static_cast<StopReason>(in.u64());
  in.expect("stats");
  e.stats_.sum_infosets = in.u64();
  e.stats_.max_branching = static_cast<int>(in.u64());
  e.stats_.horizon = static_cast<int>(in.u64());
  e.stats_.num_histories = in.u64();
  e.stats_.window = static_cast<int>(in.u64());
  in.expect("rng");
  if (!(is >> e.rng_)) throw StructuralError("snapshot: bad rng state");
  in.expect("population");
  const std::size_t pop_bytes = in.u64();
  is.get();  // newline
  std::string pop_text(pop_bytes, '\0');
  if (!is.read(pop_text.data(), static_cast<std::streamsize>(pop_bytes))) throw StructuralError("snapshot truncated");
  std::istringstream pop_in(pop_text);
  e.pop_ = std::make_shared<const Population>(read_population(pop_in, g));
  e.view_ = GameView(g, e.pop_);
  in.expect("tables");
  if (in.u64() != g.total_actions()) throw StructuralError("snapshot tables do not match the game");
  for (auto* v : {&e.tables_.regrets, &e.tables_.strategy_sum, &e.tables_.total_strategy_sum, &e.tables_.current})
    for (double& x : *v) x = in.real();
  in.expect("records");
  for (std::uint64_t n = in.u64(); n > 0; --n) {
    MetricsRecord r;
    r.iteration = in.u64();
    r.nodes_rm = in.u64();
    r.nodes_br = in.u64();
    r.nodes_eval = in.u64();
    r.nodes_reported = in.u64();
    r.exploitability_las = in.opt_real();
    r.exploitability_oas = in.opt_real();
    r.window_j = static_cast<int>(in.u64());
    r.sum_infosets = in.u64();
    r.population_size = in.u64();
    r.wall_ms = in.real();
    e.log_.records.push_back(r);
  }
  in.expect("events");
  for (std::uint64_t n = in.u64(); n > 0; --n) {
    WindowEvent ev;
    ev.iteration = in.u64();
    ev.kind = static_cast<EventKind>(in.u64());
    ev.j = static_cast<int>(in.u64());
    ev.local_e = in.opt_real();
    ev.threshold = in.opt_real();
    ev.changed = in.u64() != 0;
    ev.added = in.u64();
    ev.population_size = in.u64();
    ev.sum_infosets = in.u64();
    ev.next_m = in.u64();
    e.log_.events.push_back(ev);
  }
  in.expect("end");
  return e;
}

}  // namespace rmdo
