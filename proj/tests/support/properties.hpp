#pragma once

#include <cstdint>
#include <string>

namespace taskforge::testkit {

struct PropertyReport {
  long cases = 0;
  long violations = 0;
  std::string first_failure;

  void fail(const std::string& why) {
    if (violations++ == 0) first_failure = why;
  }
  bool ok() const { return cases > 0 && violations == 0; }
};

/// 81-point grid of one tower against one enemy, compared with the 1 ms scalar oracle.
PropertyReport oracle_grid();

/// Invariants checked at every tick of randomized command sequences on preset levels.
struct FuzzReport {
  PropertyReport economy;          // starting + bounties == money + purchases - refunds (from events)
  PropertyReport health;           // monotone in ATTACK, exactly -1 per LEAKED
  PropertyReport progress;         // within [0, length], non-decreasing without FEAR
  PropertyReport exclusivity;      // one tower per cell, one trap per path cell
  PropertyReport kill_accounting;  // KILLED = spawned - leaked - alive
  PropertyReport rejection;        // a rejected command leaves the digest unchanged
  long ticks = 0;
  long commands = 0;
};
FuzzReport economy_fuzz(int sequences, std::uint64_t seed);

/// With attack interaction disabled, every PLACE/SELL/UPGRADE during ATTACK is a phase violation
/// and leaves the state digest unchanged.
PropertyReport phase_gating(int samples, std::uint64_t seed);

PropertyReport slow_differential(int scenarios, std::uint64_t seed);
PropertyReport fear_differential(int scenarios, std::uint64_t seed);
PropertyReport support_differential(int scenarios, std::uint64_t seed);
PropertyReport discount_differential(int scenarios, std::uint64_t seed);

}  // namespace taskforge::testkit
