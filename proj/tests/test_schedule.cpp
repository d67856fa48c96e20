#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "rmdo/schedule.hpp"

using namespace rmdo;

namespace {

RestrictedStats stats(int branching, std::size_t infosets, int horizon = 1) {
  RestrictedStats s;
  s.max_branching = branching;
  s.sum_infosets = infosets;
  s.horizon = horizon;
  return s;
}

Schedule sched(ScheduleKind k) {
  Schedule s;
  s.kind = k;
  return s;
}

}  // namespace

TEST(NextCheck, ConstantSchedules) {
  EXPECT_EQ(next_check(sched(ScheduleKind::Xodo), stats(4, 50), 0.1), 1u);
  Schedule pdo = sched(ScheduleKind::Pdo);
  pdo.c = 100;
  EXPECT_EQ(next_check(pdo, stats(4, 50), 0.1), 100u);
  Schedule spdo = sched(ScheduleKind::Spdo);
  spdo.c = 25;
  EXPECT_EQ(next_check(spdo, stats(4, 50)), 25u);
  Schedule xdo = sched(ScheduleKind::Xdo);
  xdo.check_every = 7;
  EXPECT_EQ(next_check(xdo, stats(4, 50)), 7u);
  EXPECT_EQ(next_check(sched(ScheduleKind::None), stats(4, 50)), std::numeric_limits<std::uint64_t>::max());
}

// Hand arithmetic: sqrt(A) * S / eps, scaled by alpha and rounded up.
TEST(NextCheck, AdaptiveSubstitutions) {
  Schedule s = sched(ScheduleKind::Adado);
  EXPECT_EQ(next_check(s, stats(4, 50), 0.01), 10000u);  // 2 * 50 / 0.01
  s.alpha = 0.5;
  EXPECT_EQ(next_check(s, stats(9, 12), 1e-3), 18000u);  // 0.5 * 3 * 12 / 0.001
  s.alpha = 1.0;
  EXPECT_EQ(next_check(s, stats(2, 12), 0.1), 170u);     // 1.41421 * 120 = 169.7
  EXPECT_EQ(next_check(s, stats(1, 3), 0.5), 6u);        // 1 * 3 / 0.5
  s.alpha = 0.01;
  EXPECT_EQ(next_check(s, stats(1, 3), 0.5), 1u);        // 0.06, never below one
}

// Hand arithmetic: sqrt(A * S^3 / (H * eps^2)).
TEST(NextCheck, StochasticAdaptiveSubstitutions) {
  Schedule s = sched(ScheduleKind::Sado);
  EXPECT_EQ(next_check(s, stats(4, 100, 4), 0.1), 10000u);  // sqrt(4e6 / 4e-2)
  EXPECT_EQ(next_check(s, stats(2, 12, 2), 0.5), 84u);      // sqrt(6912) = 83.14
  EXPECT_EQ(next_check(s, stats(1, 1, 1), 1.0), 1u);
  EXPECT_EQ(next_check(s, stats(9, 4, 1), 0.2), 120u);      // sqrt(9 * 64 / 0.04) = 120
  // a zero horizon is treated as one
  EXPECT_EQ(next_check(s, stats(9, 4, 0), 0.2), 120u);
}

TEST(NextCheck, TargetEpsFieldIsUsedByDefault) {
  Schedule s = sched(ScheduleKind::Adado);
  s.target_eps = 0.01;
  EXPECT_EQ(next_check(s, stats(4, 50)), 10000u);
  s.target_eps = 0.0;
  EXPECT_THROW(next_check(s, stats(4, 50)), ContractError);
}

TEST(CeilCount, RoundingNoiseIsIgnored) {
  EXPECT_EQ(ceil_count(10000.000000001), 10000u);
  EXPECT_EQ(ceil_count(9999.999999999), 10000u);
  EXPECT_EQ(ceil_count(10000.01), 10001u);
  EXPECT_EQ(ceil_count(0.2), 1u);
  EXPECT_EQ(ceil_count(std::nan("")), 1u);
}

TEST(Xdo, ThresholdHalves) {
  EXPECT_EQ(xdo_threshold(0.5, 0), 0.5);
  EXPECT_EQ(xdo_threshold(0.5, 1), 0.25);
  EXPECT_EQ(xdo_threshold(0.5, 3), 0.0625);
  EXPECT_FALSE(xdo_should_expand(0.7, 0.5, 0));
  EXPECT_TRUE(xdo_should_expand(0.5, 0.5, 0));
  EXPECT_TRUE(xdo_should_expand(0.2, 0.5, 1));
}

TEST(EarlyStop, Plateau) {
  EXPECT_TRUE(early_stop_trigger(0.10, 0.099, 0.01));
  EXPECT_FALSE(early_stop_trigger(0.5, 0.3, 0.01));
  EXPECT_FALSE(early_stop_trigger(std::nullopt, 0.3, 0.01));
  EXPECT_FALSE(early_stop_trigger(0.3, 0.32, 0.01));
}

TEST(ScheduleNames, RoundTrip) {
  for (auto k : {ScheduleKind::None, ScheduleKind::Xodo, ScheduleKind::Xdo, ScheduleKind::Pdo, ScheduleKind::Adado,
                 ScheduleKind::Spdo, ScheduleKind::Sado})
    EXPECT_EQ(parse_schedule(schedule_name(k)), k);
  EXPECT_FALSE(parse_schedule("dodo").has_value());
  EXPECT_TRUE(sched(ScheduleKind::Sado).stochastic());
  EXPECT_TRUE(sched(ScheduleKind::Sado).adaptive());
  EXPECT_FALSE(sched(ScheduleKind::None).double_oracle());
}
