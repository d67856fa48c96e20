#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "rmdo/game_tree.hpp"
#include "rmdo/population.hpp"

namespace rmdo {

// `None` runs the regret minimizer on the full game with no best-response checks.
enum class ScheduleKind { None, Xodo, Xdo, Pdo, Adado, Spdo, Sado };

inline const char* schedule_name(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::None: return "none";
    case ScheduleKind::Xodo: return "xodo";
    case ScheduleKind::Xdo: return "xdo";
    case ScheduleKind::Pdo: return "pdo";
    case ScheduleKind::Adado: return "adado";
    case ScheduleKind::Spdo: return "spdo";
    case ScheduleKind::Sado: return "sado";
  }
  return "?";
}

inline std::optional<ScheduleKind> parse_schedule(const std::string& s) {
  for (auto k : {ScheduleKind::None, ScheduleKind::Xodo, ScheduleKind::Xdo, ScheduleKind::Pdo, ScheduleKind::Adado,
                 ScheduleKind::Spdo, ScheduleKind::Sado})
    if (s == schedule_name(k)) return k;
  return std::nullopt;
}

struct EarlyStop {
  bool enabled = false;
  double delta = 1e-3;       // plateau tolerance between consecutive checks
  std::uint64_t every = 10;  // iterations between local checks
};

struct Schedule {
  ScheduleKind kind = ScheduleKind::None;
  std::uint64_t c = 100;           // pdo, spdo
  double eps0 = 0.5;               // xdo
  std::uint64_t check_every = 10;  // xdo
  double target_eps = 0.0;         // adado, sado; 0 means "use the run's target"
  double alpha = 1.0;              // adado
  EarlyStop early_stop;            // adado, sado

  bool double_oracle() const { return kind != ScheduleKind::None; }
  bool stochastic() const { return kind == ScheduleKind::Spdo || kind == ScheduleKind::Sado; }
  bool adaptive() const { return kind == ScheduleKind::Adado || kind == ScheduleKind::Sado; }
};

// Smallest integer >= x, treating values within rounding noise of an integer as
// that integer.
inline std::uint64_t ceil_count(double x) {
  if (!(x >= 1.0)) return 1;
  if (x >= 1e18) return static_cast<std::uint64_t>(1e18);
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * x) return static_cast<std::uint64_t>(r);
  return static_cast<std::uint64_t>(std::ceil(x));
}

inline double adado_frequency(int max_branching, double sum_infosets, double eps) {
  return std::sqrt(static_cast<double>(max_branching)) * sum_infosets / eps;
}

inline double sado_frequency(int max_branching, double sum_infosets, int horizon, double eps) {
  return std::sqrt(static_cast<double>(max_branching) * sum_infosets * sum_infosets * sum_infosets /
                   (static_cast<double>(horizon) * eps * eps));
}

// Iterations of regret minimization between best-response checks in the
// current window. `eps` is the target precision used by the adaptive kinds.
inline std::uint64_t next_check(const Schedule& s, const RestrictedStats& st, double eps) {
  switch (s.kind) {
    case ScheduleKind::None: return std::numeric_limits<std::uint64_t>::max();
    case ScheduleKind::Xodo: return 1;
    case ScheduleKind::Xdo: return s.check_every;
    case ScheduleKind::Pdo:
    case ScheduleKind::Spdo: return std::max<std::uint64_t>(1, s.c);
    case ScheduleKind::Adado:
      if (!(eps > 0.0)) throw ContractError("adado needs a positive target exploitability");
      return ceil_count(s.alpha * adado_frequency(st.max_branching, static_cast<double>(st.sum_infosets), eps));
    case ScheduleKind::Sado:
      if (!(eps > 0.0)) throw ContractError("sado needs a positive target exploitability");
      return ceil_count(sado_frequency(st.max_branching, static_cast<double>(st.sum_infosets),
                                       std::max(st.horizon, 1), eps));
  }
  return 1;
}

inline std::uint64_t next_check(const Schedule& s, const RestrictedStats& st) {
  return next_check(s, st, s.target_eps);
}

inline double xdo_threshold(double eps0, int j) { return std::ldexp(eps0, -j); }

inline bool xdo_should_expand(double local_e, double eps0, int j) { return local_e <= xdo_threshold(eps0, j); }

// The first check of a window has no previous value and never triggers.
inline bool early_stop_trigger(std::optional<double> prev, double now, double delta) {
  return prev.has_value() && std::abs(now - *prev) < delta;
}

}  // namespace rmdo
