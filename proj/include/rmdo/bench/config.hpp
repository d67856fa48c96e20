#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rmdo/engine.hpp"
#include "rmdo/games/registry.hpp"

namespace rmdo::bench {

// Line-oriented "[section]" / "key = value" text. '#' and ';' start comments.
struct ConfigEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

struct ConfigDocument {
  std::string origin;
  std::vector<ConfigEntry> entries;

  const ConfigEntry* find(const std::string& section, const std::string& key) const {
    const ConfigEntry* hit = nullptr;
    for (const auto& e : entries)
      if (e.section == section && e.key == key) hit = &e;
    return hit;
  }
  void set(const std::string& section, const std::string& key, const std::string& value) {
    for (auto& e : entries)
      if (e.section == section && e.key == key) {
        e.value = value;
        return;
      }
    entries.push_back({section, key, value, 0});
  }
  std::string where(const ConfigEntry& e) const {
    return origin + (e.line > 0 ? ":" + std::to_string(e.line) : std::string()) + ": ";
  }
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline ConfigDocument parse_document(const std::string& text, const std::string& origin = "<config>") {
  ConfigDocument doc{origin, {}};
  std::istringstream in(text);
  std::string raw, section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
    if (section.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": key outside any section");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (doc.find(section, key))
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + section + "." + key + "'");
    doc.entries.push_back({section, key, trim(line.substr(eq + 1)), lineno});
  }
  return doc;
}

inline ConfigDocument load_document(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_document(ss.str(), path);
}

struct RunConfig {
  std::string name = "run";
  std::string label;  // grouping key for reports; defaults to the algorithm
  std::string output_dir;
  GameConfig game{"kuhn", {}};
  EngineConfig engine;

  std::string effective_label() const {
    if (!label.empty()) return label;
    std::string l = engine.schedule.kind == ScheduleKind::None ? solver_name(engine.solver)
                                                               : schedule_name(engine.schedule.kind);
    if (engine.warm_start.carrying()) l += "-ws";
    return l;
  }
};

namespace detail {

inline long long to_int(const ConfigDocument& d, const ConfigEntry& e) {
  char* end = nullptr;
  const long long v = std::strtoll(e.value.c_str(), &end, 10);
  if (e.value.empty() || *end) throw ConfigError(d.where(e) + e.key + ": expected an integer, got '" + e.value + "'");
  return v;
}

inline std::uint64_t to_count(const ConfigDocument& d, const ConfigEntry& e) {
  // Accept 1e8 style for budgets.
  char* end = nullptr;
  const double v = std::strtod(e.value.c_str(), &end);
  if (e.value.empty() || *end || v < 0 || v != std::floor(v))
    throw ConfigError(d.where(e) + e.key + ": expected a non-negative integer, got '" + e.value + "'");
  return static_cast<std::uint64_t>(v);
}

inline double to_real(const ConfigDocument& d, const ConfigEntry& e) {
  char* end = nullptr;
  const double v = std::strtod(e.value.c_str(), &end);
  if (e.value.empty() || *end) throw ConfigError(d.where(e) + e.key + ": expected a number, got '" + e.value + "'");
  return v;
}

inline bool to_bool(const ConfigDocument& d, const ConfigEntry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes" || e.value == "on") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no" || e.value == "off") return false;
  throw ConfigError(d.where(e) + e.key + ": expected true/false, got '" + e.value + "'");
}

}  // namespace detail

inline RunConfig build_run_config(const ConfigDocument& doc) {
  using namespace detail;
  RunConfig rc;
  EngineConfig& ec = rc.engine;
  bool have_game = false;
  for (const auto& e : doc.entries) {
    const std::string& s = e.section;
    const std::string& k = e.key;
    auto bad_key = [&] { throw ConfigError(doc.where(e) + "unknown key '" + k + "' in [" + s + "]"); };
    if (s == "game") {
      if (k == "name") {
        rc.game.name = e.value;
        have_game = true;
      } else {
        rc.game.params[k] = to_int(doc, e);
      }
    } else if (s == "algorithm") {
      if (k == "solver") {
        auto v = parse_solver(e.value);
        if (!v) throw ConfigError(doc.where(e) + "unknown solver '" + e.value + "' (cfr, lcfr, mccfr)");
        ec.solver = *v;
      } else if (k == "schedule") {
        auto v = parse_schedule(e.value);
        if (!v) throw ConfigError(doc.where(e) + "unknown schedule '" + e.value + "'");
        ec.schedule.kind = *v;
      } else if (k == "c") {
        ec.schedule.c = to_count(doc, e);
      } else if (k == "eps0") {
        ec.schedule.eps0 = to_real(doc, e);
      } else if (k == "check_every") {
        ec.schedule.check_every = to_count(doc, e);
      } else if (k == "target_eps") {
        ec.schedule.target_eps = to_real(doc, e);
      } else if (k == "alpha") {
        ec.schedule.alpha = to_real(doc, e);
      } else if (k == "early_stop") {
        ec.schedule.early_stop.enabled = to_bool(doc, e);
      } else if (k == "early_stop_delta") {
        ec.schedule.early_stop.delta = to_real(doc, e);
      } else if (k == "early_stop_every") {
        ec.schedule.early_stop.every = to_count(doc, e);
      } else if (k == "explore") {
        ec.explore = to_real(doc, e);
      } else {
        bad_key();
      }
    } else if (s == "warm_start") {
      if (k == "mode") {
        if (e.value == "reset")
          ec.warm_start.kind = WarmStartMode::Kind::Reset;
        else if (e.value == "carry")
          ec.warm_start.kind = WarmStartMode::Kind::Carry;
        else
          throw ConfigError(doc.where(e) + "warm_start mode must be reset or carry");
      } else if (k == "eps_init") {
        ec.warm_start.eps_init = to_real(doc, e);
      } else if (k == "zero_accumulator") {
        ec.warm_start.zero_accumulator = to_bool(doc, e);
      } else {
        bad_key();
      }
    } else if (s == "run") {
      if (k == "name") rc.name = e.value;
      else if (k == "label") rc.label = e.value;
      else if (k == "output_dir") rc.output_dir = e.value;
      else if (k == "seed") ec.seed = to_count(doc, e);
      else if (k == "node_budget") ec.stop.node_budget = to_count(doc, e);
      else if (k == "target_exploitability") ec.stop.target_exploitability = to_real(doc, e);
      else if (k == "max_iterations") ec.stop.max_iterations = to_count(doc, e);
      else bad_key();
    } else if (s == "log") {
      if (k == "cadence") {
        if (e.value == "geometric") ec.log.kind = LogCadence::Kind::Geometric;
        else if (e.value == "iterations") ec.log.kind = LogCadence::Kind::Iterations;
        else if (e.value == "nodes") ec.log.kind = LogCadence::Kind::Nodes;
        else throw ConfigError(doc.where(e) + "cadence must be geometric, iterations or nodes");
      } else if (k == "ratio") {
        ec.log.ratio = to_real(doc, e);
      } else if (k == "every") {
        ec.log.every = to_count(doc, e);
      } else if (k == "exploitability") {
        ec.log.exploitability = to_bool(doc, e);
      } else if (k == "oas") {
        ec.log.oas = to_bool(doc, e);
      } else if (k == "wall_time") {
        ec.log.wall_time = to_bool(doc, e);
      } else {
        bad_key();
      }
    } else if (s == "sweep") {
      // read by the sweep runner
    } else {
      throw ConfigError(doc.where(e) + "unknown section [" + s + "]");
    }
  }
  if (!have_game) throw ConfigError(doc.origin + ": missing [game] name");
  // Surface game and engine validation errors as configuration errors.
  try {
    games::resolve_params(rc.game);
    validate(rc.engine);
  } catch (const ContractError& ex) {
    throw ConfigError(doc.origin + ": " + ex.what());
  } catch (const ConfigError& ex) {
    throw ConfigError(doc.origin + ": " + ex.what());
  }
  return rc;
}

inline RunConfig parse_run_config(const std::string& text, const std::string& origin = "<config>") {
  return build_run_config(parse_document(text, origin));
}

inline RunConfig load_run_config(const std::string& path) { return build_run_config(load_document(path)); }

namespace detail {
inline std::string fmt_real(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}
}  // namespace detail

// Canonical, complete serialization: parsing it back yields the same config.
inline std::string to_text(const RunConfig& rc) {
  using detail::fmt_real;
  const EngineConfig& ec = rc.engine;
  std::ostringstream os;
  os << "[game]\nname = " << rc.game.name << '\n';
  for (const auto& [k, v] : games::resolve_params(rc.game)) os << k << " = " << v << '\n';
  os << "\n[algorithm]\nsolver = " << solver_name(ec.solver) << "\nschedule = " << schedule_name(ec.schedule.kind)
     << "\nc = " << ec.schedule.c << "\neps0 = " << fmt_real(ec.schedule.eps0)
     << "\ncheck_every = " << ec.schedule.check_every << "\ntarget_eps = " << fmt_real(ec.schedule.target_eps)
     << "\nalpha = " << fmt_real(ec.schedule.alpha) << "\nearly_stop = " << (ec.schedule.early_stop.enabled ? "true" : "false")
     << "\nearly_stop_delta = " << fmt_real(ec.schedule.early_stop.delta)
     << "\nearly_stop_every = " << ec.schedule.early_stop.every << "\nexplore = " << fmt_real(ec.explore) << '\n';
  os << "\n[warm_start]\nmode = " << (ec.warm_start.carrying() ? "carry" : "reset")
     << "\neps_init = " << fmt_real(ec.warm_start.eps_init)
     << "\nzero_accumulator = " << (ec.warm_start.zero_accumulator ? "true" : "false") << '\n';
  os << "\n[run]\nname = " << rc.name << '\n';
  if (!rc.label.empty()) os << "label = " << rc.label << '\n';
  if (!rc.output_dir.empty()) os << "output_dir = " << rc.output_dir << '\n';
  os << "seed = " << ec.seed << "\nnode_budget = " << ec.stop.node_budget
     << "\ntarget_exploitability = " << fmt_real(ec.stop.target_exploitability)
     << "\nmax_iterations = " << ec.stop.max_iterations << '\n';
  const char* cadence = ec.log.kind == LogCadence::Kind::Geometric   ? "geometric"
                        : ec.log.kind == LogCadence::Kind::Iterations ? "iterations"
                                                                       : "nodes";
  os << "\n[log]\ncadence = " << cadence << "\nratio = " << fmt_real(ec.log.ratio) << "\nevery = " << ec.log.every
     << "\nexploitability = " << (ec.log.exploitability ? "true" : "false")
     << "\noas = " << (ec.log.oas ? "true" : "false") << "\nwall_time = " << (ec.log.wall_time ? "true" : "false")
     << '\n';
  return os.str();
}

//------------------------------------------------------------------------------
// Sweeps: [sweep] holds "section.key = v1, v2, ..." axes plus max_runs and
// threads. Runs are the cartesian product in axis declaration order.
//------------------------------------------------------------------------------

struct SweepAxis {
  std::string section;
  std::string key;
  std::vector<std::string> values;
};

struct SweepConfig {
  ConfigDocument base;
  std::vector<SweepAxis> axes;
  std::size_t max_runs = 256;
  unsigned threads = 1;
};

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    // "a..b" expands to the integers a..b
    const auto dots = tok.find("..");
    if (dots != std::string::npos) {
      const long long a = std::stoll(tok.substr(0, dots)), b = std::stoll(tok.substr(dots + 2));
      for (long long v = a; v <= b; ++v) out.push_back(std::to_string(v));
    } else {
      out.push_back(tok);
    }
  }
  return out;
}

inline SweepConfig build_sweep_config(const ConfigDocument& doc) {
  SweepConfig sc;
  sc.base.origin = doc.origin;
  for (const auto& e : doc.entries) {
    if (e.section != "sweep") {
      sc.base.entries.push_back(e);
      continue;
    }
    if (e.key == "max_runs") {
      sc.max_runs = detail::to_count(doc, e);
    } else if (e.key == "threads") {
      sc.threads = static_cast<unsigned>(std::max<std::uint64_t>(1, detail::to_count(doc, e)));
    } else {
      const auto dot = e.key.find('.');
      if (dot == std::string::npos)
        throw ConfigError(doc.where(e) + "sweep axis must be written section.key, got '" + e.key + "'");
      SweepAxis ax{e.key.substr(0, dot), e.key.substr(dot + 1), {}};
      try {
        ax.values = split_list(e.value);
      } catch (const std::exception&) {
        throw ConfigError(doc.where(e) + "bad range in '" + e.value + "'");
      }
      if (ax.values.empty()) throw ConfigError(doc.where(e) + "sweep axis has no values");
      sc.axes.push_back(std::move(ax));
    }
  }
  std::size_t total = 1;
  for (const auto& ax : sc.axes) {
    total *= ax.values.size();
    if (total > sc.max_runs)
      throw ConfigError(doc.origin + ": sweep expands to more than max_runs = " + std::to_string(sc.max_runs) + " runs");
  }
  return sc;
}

// Every run of the sweep, validated, named "<base>__key=value__...".
inline std::vector<RunConfig> expand_sweep(const SweepConfig& sc) {
  std::vector<RunConfig> runs;
  std::vector<std::size_t> idx(sc.axes.size(), 0);
  while (true) {
    ConfigDocument doc = sc.base;
    std::string suffix;
    for (std::size_t i = 0; i < sc.axes.size(); ++i) {
      const auto& ax = sc.axes[i];
      doc.set(ax.section, ax.key, ax.values[idx[i]]);
      suffix += "__" + ax.key + "=" + ax.values[idx[i]];
    }
    RunConfig rc = build_run_config(doc);
    rc.name += suffix;
    runs.push_back(std::move(rc));
    std::size_t i = sc.axes.size();
    while (i > 0) {
      --i;
      if (++idx[i] < sc.axes[i].values.size()) break;
      idx[i] = 0;
      if (i == 0) return runs;
    }
    if (sc.axes.empty()) return runs;
  }
}

}  // namespace rmdo::bench
