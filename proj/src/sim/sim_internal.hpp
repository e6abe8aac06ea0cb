#pragma once

#include <string_view>

#include "taskforge/sim/game.hpp"

namespace taskforge::detail {

inline constexpr double kEps = 1e-9;
inline constexpr double kRangeStep = 1.25;
inline constexpr double kDamageStep = 1.5;
inline constexpr double kFirerateStep = 1.25;

int spec_index(const SessionConfig& cfg, std::string_view id);
std::size_t pool_index(const GameState& s, int slot);
void credit_bounty(GameState& s, std::int64_t bounty);
void place_trap(GameState& s, TowerInstance& t);
void end_round(GameState& s, Outcome outcome, Events& out);
void end_planning(GameState& s, Events& out);

}  // namespace taskforge::detail
