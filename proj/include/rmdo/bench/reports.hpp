#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rmdo/bench/config.hpp"
#include "rmdo/bench/run_io.hpp"
#include "rmdo/evaluation.hpp"

namespace rmdo::bench {

//------------------------------------------------------------------------------
// Nodes to target
//------------------------------------------------------------------------------

// Reported-node abscissa of the first record whose LAS exploitability is at
// or below `target`.
inline std::optional<std::uint64_t> nodes_to_target(const std::vector<MetricsRecord>& records, double target) {
  for (const auto& r : records)
    if (r.exploitability_las && *r.exploitability_las <= target) return r.nodes_reported;
  return std::nullopt;
}

struct Cell {
  std::size_t runs = 0;
  std::vector<double> reached;  // node counts of the runs that reached the target
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
};

inline MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return m;
}

inline double median(std::vector<double> xs) {
  if (xs.empty()) return std::nan("");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

// "mean (std)" in millions of nodes; "—" when no run reached the target; a
// "[r/n]" suffix when only some runs did.
inline std::string format_cell(const Cell& c) {
  if (c.reached.empty()) return "—";
  const MeanStd m = mean_std(c.reached);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.3f (%.3f)", m.mean / 1e6, m.std / 1e6);
  std::string s = buf;
  if (c.reached.size() < c.runs) s += " [" + std::to_string(c.reached.size()) + "/" + std::to_string(c.runs) + "]";
  return s;
}

struct LabeledRun {
  std::string label;
  std::vector<MetricsRecord> records;
};

struct TargetTable {
  std::vector<std::string> labels;  // first-seen order
  std::vector<double> targets;
  std::map<std::string, std::vector<Cell>> cells;

  std::string render() const {
    std::ostringstream os;
    os << "target";
    for (const auto& l : labels) os << '\t' << l;
    os << '\n';
    for (std::size_t t = 0; t < targets.size(); ++t) {
      os << fmt_g(targets[t]);
      for (const auto& l : labels) os << '\t' << format_cell(cells.at(l)[t]);
      os << '\n';
    }
    return os.str();
  }
};

inline TargetTable nodes_to_target_table(const std::vector<LabeledRun>& runs, const std::vector<double>& targets) {
  TargetTable tab;
  tab.targets = targets;
  for (const auto& r : runs) {
    if (!tab.cells.count(r.label)) {
      tab.labels.push_back(r.label);
      tab.cells[r.label].assign(targets.size(), Cell{});
    }
    auto& row = tab.cells[r.label];
    for (std::size_t t = 0; t < targets.size(); ++t) {
      ++row[t].runs;
      if (auto n = nodes_to_target(r.records, targets[t])) row[t].reached.push_back(static_cast<double>(*n));
    }
  }
  return tab;
}

//------------------------------------------------------------------------------
// Support of a finished run
//------------------------------------------------------------------------------

struct RunSupport {
  bool reached = false;
  std::optional<double> final_exploitability;
  SupportReport report;
};

inline RunSupport run_support(const fs::path& run_dir, double at, double threshold) {
  RunConfig rc = load_run_config((run_dir / "config.ini").string());
  GameTree g = build_game(rc.game);
  const auto records = load_metrics(run_dir);
  RunSupport out;
  if (!records.empty()) out.final_exploitability = records.back().exploitability_las;
  out.reached = out.final_exploitability && *out.final_exploitability <= at;
  std::ifstream f(run_dir / "policy.txt");
  if (!f) throw StructuralError("no policy.txt in " + run_dir.string());
  out.report = support_metrics(read_policy(f, g), g, threshold);
  return out;
}

//------------------------------------------------------------------------------
// Plot data
//------------------------------------------------------------------------------

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;  // (nodes_reported, exploitability)
};

// Keeps at most `max_points` records, evenly spaced in log(nodes), plus the last.
inline Series downsample(const std::string& name, const std::vector<MetricsRecord>& records,
                         std::size_t max_points = 200) {
  Series s{name, {}};
  std::vector<std::pair<double, double>> all;
  for (const auto& r : records)
    if (r.exploitability_las && r.nodes_reported > 0)
      all.emplace_back(static_cast<double>(r.nodes_reported), *r.exploitability_las);
  if (all.size() <= max_points) {
    s.points = all;
    return s;
  }
  const double lo = std::log(all.front().first), hi = std::log(all.back().first);
  double next = lo;
  const double step = (hi - lo) / static_cast<double>(max_points - 1);
  for (const auto& p : all)
    if (std::log(p.first) >= next) {
      s.points.push_back(p);
      next = std::log(p.first) + step;
    }
  if (s.points.back() != all.back()) s.points.push_back(all.back());
  return s;
}

inline void write_series_csv(std::ostream& os, const Series& s) {
  os << "# x: nodes_reported (log), y: exploitability_las (log)\n";
  os << "nodes_reported,exploitability_las\n";
  for (const auto& [x, y] : s.points) os << fmt_g(x) << ',' << fmt_g(y) << '\n';
}

// Self-contained log-log SVG with one polyline per series.
inline std::string render_svg(const std::vector<Series>& series, const std::string& title) {
  const double W = 640, H = 420, L = 70, R = 160, T = 30, B = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (y <= 0) continue;
      xmin = std::min(xmin, std::log10(x));
      xmax = std::max(xmax, std::log10(x));
      ymin = std::min(ymin, std::log10(y));
      ymax = std::max(ymax, std::log10(y));
    }
  if (xmin > xmax) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  xmin = std::floor(xmin), xmax = std::max(std::ceil(xmax), xmin + 1);
  ymin = std::floor(ymin), ymax = std::max(std::ceil(ymax), ymin + 1);
  auto px = [&](double lx) { return L + (lx - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double ly) { return H - B - (ly - ymin) / (ymax - ymin) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << L << "\" y=\"18\" font-size=\"13\">" << title << "</text>\n";
  for (double d = xmin; d <= xmax + 1e-9; d += 1)
    os << "<line x1=\"" << px(d) << "\" y1=\"" << T << "\" x2=\"" << px(d) << "\" y2=\"" << H - B
       << "\" stroke=\"#ddd\"/><text x=\"" << px(d) - 10 << "\" y=\"" << H - B + 15 << "\">1e" << d << "</text>\n";
  for (double d = ymin; d <= ymax + 1e-9; d += 1)
    os << "<line x1=\"" << L << "\" y1=\"" << py(d) << "\" x2=\"" << W - R << "\" y2=\"" << py(d)
       << "\" stroke=\"#ddd\"/><text x=\"" << 20 << "\" y=\"" << py(d) + 4 << "\">1e" << d << "</text>\n";
  os << "<text x=\"" << (L + W - R) / 2 - 40 << "\" y=\"" << H - 12 << "\">visited nodes</text>\n";
  os << "<text x=\"12\" y=\"" << T - 8 << "\">exploitability</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* c = colors[i % 8];
    os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : series[i].points)
      if (y > 0) os << px(std::log10(x)) << ',' << py(std::log10(y)) << ' ';
    os << "\"/>\n";
    os << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 14 * (i + 1) << "\" fill=\"" << c << "\">" << series[i].name
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

//------------------------------------------------------------------------------
// Sweep runner
//------------------------------------------------------------------------------

// Runs are independent; each owns its directory. Results keep sweep order.
inline std::vector<RunOutcome> run_sweep(const std::vector<RunConfig>& runs, unsigned threads,
                                         std::ostream* progress = nullptr) {
  std::vector<RunOutcome> out(runs.size());
  std::vector<std::string> errors(runs.size());
  std::atomic<std::size_t> next{0};
  std::mutex io;
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      try {
        out[i] = execute_run(runs[i]);
      } catch (const std::exception& ex) {
        errors[i] = ex.what();
      }
      if (progress) {
        std::lock_guard<std::mutex> lock(io);
        *progress << "[" << i + 1 << "/" << runs.size() << "] " << runs[i].name
                  << (errors[i].empty() ? "" : " failed: " + errors[i]) << '\n';
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::max(1u, threads); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < runs.size(); ++i)
    if (!errors[i].empty()) throw std::runtime_error("run " + runs[i].name + " failed: " + errors[i]);
  return out;
}

}  // namespace rmdo::bench
