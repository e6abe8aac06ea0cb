#include <gtest/gtest.h>

#include "support/properties.hpp"

using namespace taskforge::testkit;

namespace {

void expect_ok(const PropertyReport& r, long min_cases) {
  EXPECT_GE(r.cases, min_cases);
  EXPECT_EQ(r.violations, 0) << r.first_failure;
}

}  // namespace

TEST(OracleGrid, AllCasesWithinOneTick) {
  const auto r = oracle_grid();
  EXPECT_EQ(r.cases, 81);
  EXPECT_EQ(r.violations, 0) << r.first_failure;
}

TEST(EconomyFuzz, InvariantsHold) {
  const auto r = economy_fuzz(60, 0x5eed0001);
  expect_ok(r.economy, 1000);
  expect_ok(r.health, 100);
  expect_ok(r.progress, 100);
  expect_ok(r.exclusivity, 1000);
  expect_ok(r.kill_accounting, 60);
  expect_ok(r.rejection, 500);
}

TEST(PhaseGating, AttackRejectsEditsWhenDisabled) { expect_ok(phase_gating(200, 7), 200); }

TEST(SlowDifferential, NeverEarlierAndStrictlyLaterOnOverlap) { expect_ok(slow_differential(200, 11), 200); }

TEST(FearDifferential, NoAdvanceWhileFearedAndImmunityRespected) { expect_ok(fear_differential(150, 13), 1000); }

TEST(SupportDifferential, NeverLowersStats) { expect_ok(support_differential(200, 17), 200); }

TEST(DiscountDifferential, BestSingleDiscountApplies) { expect_ok(discount_differential(300, 19), 200); }
