#pragma once

#include <vector>

#include "taskforge/sim/game.hpp"

namespace taskforge {

/// Fixed build order used by the bots: each slot places its towers on the cells that cover the
/// most path, then buys DAMAGE upgrades, keeping `reserve` of the starting gold unspent.
/// Ends with READY for every slot. Pure function of the state, so schedules are reproducible.
std::vector<Command> scripted_plan(const GameState& state, double reserve = 0.6);

/// Commands for one slot only (a bot playing a single seat).
std::vector<Command> scripted_plan_for(const GameState& state, int slot, double reserve = 0.6);

/// Best free buildable cell for `spec_id` by path coverage; ties go to the lowest (y, x).
/// `skip` drops that many of the best candidates.
std::optional<Cell> best_cell(const GameState& state, const TowerSpec& spec, int skip = 0);

/// Drives the state to ENDED: planning ticks until the phase changes, then attack ticks.
/// Returns every event produced. Throws std::runtime_error if `max_ticks` is exceeded.
Events run_to_end(GameState& state, long max_ticks = 1'000'000);

}  // namespace taskforge
