#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmdo/bench/config.hpp"
#include "rmdo/engine.hpp"
#include "rmdo/games/registry.hpp"

namespace rmdo::bench {

namespace fs = std::filesystem;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kMetricsHeader =
    "iteration,nodes_rm,nodes_br,nodes_eval,nodes_reported,exploitability_las,exploitability_oas,window_j,"
    "sum_infosets,population_size,wall_ms";
inline constexpr const char* kEventsHeader =
    "iteration,kind,j,local_exploitability,threshold,changed,added,population_size,sum_infosets,next_m";

inline std::string fmt_g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string fmt_opt(const std::optional<double>& x) { return x ? fmt_g(*x) : std::string(); }

inline void write_metrics_csv(std::ostream& os, const std::vector<MetricsRecord>& records) {
  os << kMetricsHeader << '\n';
  for (const auto& r : records)
    os << r.iteration << ',' << r.nodes_rm << ',' << r.nodes_br << ',' << r.nodes_eval << ',' << r.nodes_reported
       << ',' << fmt_opt(r.exploitability_las) << ',' << fmt_opt(r.exploitability_oas) << ',' << r.window_j << ','
       << r.sum_infosets << ',' << r.population_size << ',' << fmt_g(r.wall_ms) << '\n';
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::vector<MetricsRecord> read_metrics_csv(std::istream& is, const std::string& origin = "metrics.csv") {
  std::string line;
  if (!std::getline(is, line)) throw StructuralError(origin + ": empty file");
  if (trim(line) != kMetricsHeader) throw StructuralError(origin + ": unexpected header");
  std::vector<MetricsRecord> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto c = split_csv_line(trim(line));
    if (c.size() != 11) throw StructuralError(origin + ":" + std::to_string(lineno) + ": expected 11 columns");
    try {
      MetricsRecord r;
      r.iteration = std::stoull(c[0]);
      r.nodes_rm = std::stoull(c[1]);
      r.nodes_br = std::stoull(c[2]);
      r.nodes_eval = std::stoull(c[3]);
      r.nodes_reported = std::stoull(c[4]);
      if (!c[5].empty()) r.exploitability_las = std::stod(c[5]);
      if (!c[6].empty()) r.exploitability_oas = std::stod(c[6]);
      r.window_j = std::stoi(c[7]);
      r.sum_infosets = std::stoull(c[8]);
      r.population_size = std::stoull(c[9]);
      r.wall_ms = std::stod(c[10]);
      out.push_back(r);
    } catch (const std::logic_error&) {
      throw StructuralError(origin + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  return out;
}

inline void write_events_csv(std::ostream& os, const std::vector<WindowEvent>& events) {
  os << kEventsHeader << '\n';
  for (const auto& e : events)
    os << e.iteration << ',' << (e.kind == EventKind::BrCheck ? "br_check" : "local_check") << ',' << e.j << ','
       << fmt_opt(e.local_e) << ',' << fmt_opt(e.threshold) << ',' << (e.changed ? 1 : 0) << ',' << e.added << ','
       << e.population_size << ',' << e.sum_infosets << ',' << e.next_m << '\n';
}

// One line per infostate: "<key>\t<p0>,<p1>,...".
inline void write_policy(std::ostream& os, const TabularPolicy& pi) {
  const GameTree& g = pi.tree();
  for (InfosetId s = 0; s < static_cast<InfosetId>(g.num_infosets()); ++s) {
    os << g.infoset_info(s).key << '\t';
    auto p = pi.at(s);
    for (std::size_t a = 0; a < p.size(); ++a) os << (a ? "," : "") << fmt_g(p[a]);
    os << '\n';
  }
}

inline TabularPolicy read_policy(std::istream& is, const GameTree& g) {
  TabularPolicy pi(g);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    const InfosetId s = tab == std::string::npos ? kNoInfoset : g.find_infoset(line.substr(0, tab));
    if (s == kNoInfoset) throw StructuralError("policy line " + std::to_string(lineno) + ": unknown infostate");
    const auto cells = split_csv_line(line.substr(tab + 1));
    auto probs = pi.at(s);
    if (cells.size() != probs.size())
      throw StructuralError("policy line " + std::to_string(lineno) + ": wrong number of actions");
    for (std::size_t a = 0; a < cells.size(); ++a) probs[a] = std::stod(cells[a]);
  }
  return pi;
}

// Output directory of a run: output_dir if set, else runs/<name>; relative
// paths are placed under $RMDO_OUTPUT_ROOT when that is set.
inline fs::path run_directory(const RunConfig& rc) {
  fs::path dir = rc.output_dir.empty() ? fs::path("runs") / rc.name : fs::path(rc.output_dir);
  if (const char* root = std::getenv("RMDO_OUTPUT_ROOT"); root && *root && dir.is_relative()) dir = fs::path(root) / dir;
  return dir;
}

struct RunOutcome {
  fs::path dir;
  StopReason reason = StopReason::Running;
  std::optional<double> final_exploitability;
  bool target_requested = false;
  bool target_reached = false;
};

inline nlohmann::json summary_json(const RunConfig& rc, const GameTree& g, const Engine& e) {
  const auto& recs = e.log().records;
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = rc.name;
  j["label"] = rc.effective_label();
  j["game"] = rc.game.name;
  j["game_params"] = games::resolve_params(rc.game);
  j["solver"] = solver_name(rc.engine.solver);
  j["schedule"] = schedule_name(rc.engine.schedule.kind);
  j["warm_start"] = rc.engine.warm_start.carrying() ? "carry" : "reset";
  j["seed"] = rc.engine.seed;
  j["stop_reason"] = stop_reason_name(e.stop_reason());
  j["iterations"] = e.iteration();
  j["nodes"] = {{"regret_min", e.counter().regret_min},
                {"best_response", e.counter().best_response},
                {"evaluation", e.counter().evaluation},
                {"reported", e.counter().reported()}};
  if (!recs.empty() && recs.back().exploitability_las)
    j["final_exploitability_las"] = *recs.back().exploitability_las;
  else
    j["final_exploitability_las"] = nullptr;
  if (!recs.empty() && recs.back().exploitability_oas)
    j["final_exploitability_oas"] = *recs.back().exploitability_oas;
  j["target_exploitability"] = rc.engine.stop.target_exploitability;
  j["windows_k"] = e.window() + 1;
  j["final_sum_infosets_X"] = e.stats().sum_infosets;
  j["game_infosets"] = g.num_infosets();
  j["population_size"] = e.population().size();
  return j;
}

inline void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

// Executes one run and fills its directory. The config is validated before
// anything is created on disk.
inline RunOutcome execute_run(const RunConfig& rc) {
  validate(rc.engine);
  GameTree g = build_game(rc.game);
  const fs::path dir = run_directory(rc);
  fs::create_directories(dir);
  write_text(dir / "config.ini", to_text(rc));

  Engine engine(g, rc.engine);
  while (engine.step()) {
  }

  std::ostringstream metrics, events, policy, pop;
  write_metrics_csv(metrics, engine.log().records);
  write_events_csv(events, engine.log().events);
  write_policy(policy, engine.las());
  write_population(pop, engine.population());
  write_text(dir / "metrics.csv", metrics.str());
  write_text(dir / "events.csv", events.str());
  write_text(dir / "policy.txt", policy.str());
  write_text(dir / "population.txt", pop.str());
  if (rc.engine.log.oas) {
    std::ostringstream oas;
    write_policy(oas, engine.oas());
    write_text(dir / "policy_oas.txt", oas.str());
  }
  write_text(dir / "summary.json", summary_json(rc, g, engine).dump(2) + "\n");

  RunOutcome out;
  out.dir = dir;
  out.reason = engine.stop_reason();
  const auto& recs = engine.log().records;
  if (!recs.empty()) out.final_exploitability = recs.back().exploitability_las;
  out.target_requested = rc.engine.stop.target_exploitability > 0.0;
  out.target_reached = engine.stop_reason() == StopReason::Target;
  return out;
}

inline std::vector<MetricsRecord> load_metrics(const fs::path& run_dir) {
  std::ifstream f(run_dir / "metrics.csv");
  if (!f) throw StructuralError("no metrics.csv in " + run_dir.string());
  return read_metrics_csv(f, (run_dir / "metrics.csv").string());
}

inline nlohmann::json load_summary(const fs::path& run_dir) {
  std::ifstream f(run_dir / "summary.json");
  if (!f) throw StructuralError("no summary.json in " + run_dir.string());
  return nlohmann::json::parse(f);
}

}  // namespace rmdo::bench
