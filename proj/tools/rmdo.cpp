// rmdo: run, sweep and report on double-oracle / regret-minimization experiments.
//
// Exit codes: 0 success, 1 other failure, 2 configuration error,
// 3 requested exploitability target not reached.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rmdo/bench/config.hpp"
#include "rmdo/bench/reports.hpp"
#include "rmdo/bench/run_io.hpp"
#include "rmdo/games/registry.hpp"

namespace fs = std::filesystem;
using namespace rmdo;
using namespace rmdo::bench;

namespace {

constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNotReached = 3;

int cmd_run(const std::string& path, bool quiet) {
  RunConfig rc = load_run_config(path);
  RunOutcome out = execute_run(rc);
  if (!quiet) {
    std::cout << "run " << rc.name << " -> " << out.dir.string() << "\n  stop: " << stop_reason_name(out.reason);
    if (out.final_exploitability) std::printf("\n  final LAS exploitability: %.6g", *out.final_exploitability);
    std::cout << '\n';
  }
  if (out.target_requested && !out.target_reached) {
    std::cerr << "target exploitability " << rc.engine.stop.target_exploitability << " not reached\n";
    return kExitNotReached;
  }
  return 0;
}

int cmd_sweep(const std::string& path, unsigned threads) {
  SweepConfig sc = build_sweep_config(load_document(path));
  if (threads > 0) sc.threads = threads;
  auto runs = expand_sweep(sc);
  std::cout << "sweep: " << runs.size() << " runs on " << sc.threads << " thread(s)\n";
  auto outcomes = run_sweep(runs, sc.threads, &std::cout);
  int missed = 0;
  for (const auto& o : outcomes) missed += o.target_requested && !o.target_reached;
  if (missed) {
    std::cerr << missed << " run(s) did not reach their target\n";
    return kExitNotReached;
  }
  return 0;
}

int cmd_support(const std::string& dir, double at, double threshold) {
  RunSupport s = run_support(dir, at, threshold);
  if (!s.reached) {
    std::cout << "not reached: final LAS exploitability ";
    if (s.final_exploitability)
      std::printf("%.6g", *s.final_exploitability);
    else
      std::cout << "unknown";
    std::cout << " > " << at << '\n';
    return kExitNotReached;
  }
  std::printf("min support %.1f%%\navg support %.1f%%\nmean per-infostate ratio %.1f%%\n", 100 * s.report.min_pct,
              100 * s.report.avg_pct, 100 * s.report.mean_ratio);
  if (s.report.degenerate) std::cout << "warning: some infostates have empty support at threshold " << threshold << '\n';
  return 0;
}

int cmd_nodes_to_target(const std::vector<std::string>& dirs, const std::vector<double>& targets) {
  std::vector<LabeledRun> runs;
  for (const auto& d : dirs) {
    auto summary = load_summary(d);
    runs.push_back({summary.value("label", fs::path(d).filename().string()), load_metrics(d)});
  }
  std::cout << "# reported nodes (x1e6) to reach each exploitability, mean (std) over runs per label\n";
  std::cout << nodes_to_target_table(runs, targets).render();
  return 0;
}

int cmd_plot(const std::vector<std::string>& dirs, const std::string& out_dir, bool svg, const std::string& title,
             std::size_t max_points) {
  fs::create_directories(out_dir);
  std::vector<Series> series;
  for (const auto& d : dirs) {
    const auto records = load_metrics(d);
    if (records.empty()) throw StructuralError(d + ": metrics.csv has no records");
    std::string name = fs::path(d).filename().string();
    if (name.empty()) name = fs::path(d).parent_path().filename().string();
    series.push_back(downsample(name, records, max_points));
    if (series.back().points.empty()) throw StructuralError(d + ": no logged exploitability to plot");
    std::ofstream f(fs::path(out_dir) / (name + ".csv"));
    write_series_csv(f, series.back());
  }
  if (svg) {
    std::ofstream f(fs::path(out_dir) / "figure.svg");
    f << render_svg(series, title);
  }
  std::cout << "wrote " << series.size() << " series to " << out_dir << '\n';
  return 0;
}

int cmd_enumerate(const std::string& game, const std::vector<std::string>& params) {
  GameConfig gc{game, {}};
  for (const auto& p : params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw ConfigError("parameter '" + p + "' must be key=value");
    try {
      gc.params[p.substr(0, eq)] = std::stoll(p.substr(eq + 1));
    } catch (const std::exception&) {
      throw ConfigError("parameter '" + p + "' needs an integer value");
    }
  }
  GameTree g = build_game(gc);
  std::size_t terminals = 0;
  for (NodeId h = 0; h < g.num_nodes(); ++h) terminals += g.is_terminal(h);
  std::cout << "game " << game << '\n';
  for (const auto& [k, v] : games::resolve_params(gc)) std::cout << "  " << k << " = " << v << '\n';
  std::cout << "|S_1| " << g.num_infosets(Player::P1) << "\n|S_2| " << g.num_infosets(Player::P2) << "\nhistories "
            << g.num_nodes() << "\nterminals " << terminals << "\nhorizon " << g.horizon() << "\nmax branching "
            << g.max_branching() << "\nutility [" << g.utility_min() << ", " << g.utility_max() << "]\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regret-minimizing double oracle benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "execute one run from a config file");
  run->add_option("config", config_path, "run config file")->required();
  run->add_flag("-q,--quiet", quiet);

  unsigned threads = 0;
  auto* sweep = app.add_subcommand("sweep", "execute the cartesian product of a sweep config");
  sweep->add_option("config", config_path, "sweep config file")->required();
  sweep->add_option("-j,--threads", threads, "override [sweep] threads");

  std::string run_dir;
  double at = 1e-3, threshold = 1e-9;
  auto* support = app.add_subcommand("support", "min/avg support of a run's final LAS");
  support->add_option("run_dir", run_dir)->required();
  support->add_option("--at", at, "exploitability the run must have reached")->capture_default_str();
  support->add_option("--threshold", threshold, "probability above which an action is in the support")
      ->capture_default_str();

  std::vector<std::string> dirs;
  std::vector<double> targets;
  auto* ntt = app.add_subcommand("nodes-to-target", "table of reported nodes needed to reach targets");
  ntt->add_option("run_dirs", dirs)->required();
  ntt->add_option("-t,--target", targets, "exploitability target (repeatable)")->required();

  std::string out_dir = "plots", title = "exploitability vs visited nodes";
  bool svg = false;
  std::size_t max_points = 200;
  auto* plot = app.add_subcommand("plot", "downsampled (nodes, exploitability) series");
  plot->add_option("run_dirs", dirs)->required();
  plot->add_option("-o,--out", out_dir)->capture_default_str();
  plot->add_flag("--svg", svg, "also render figure.svg");
  plot->add_option("--title", title);
  plot->add_option("--max-points", max_points)->capture_default_str();

  std::string game;
  std::vector<std::string> params;
  auto* enumerate = app.add_subcommand("enumerate", "print game statistics");
  enumerate->add_option("game", game)->required();
  enumerate->add_option("params", params, "key=value game parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, quiet);
    if (*sweep) return cmd_sweep(config_path, threads);
    if (*support) return cmd_support(run_dir, at, threshold);
    if (*ntt) return cmd_nodes_to_target(dirs, targets);
    if (*plot) return cmd_plot(dirs, out_dir, svg, title, max_points);
    if (*enumerate) return cmd_enumerate(game, params);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}
