#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "taskforge/sim/game.hpp"
#include "taskforge/telemetry/log_record.hpp"

namespace taskforge::telemetry {

using NameOf = std::function<std::string(int slot)>;

/// PLACED/SOLD/UPGRADED become ACTION records; kills, leaks, phase changes and round ends become
/// SYSTEM records. SPAWNED is not logged.
std::vector<LogRecord> event_records(const Events& events, std::optional<std::int64_t> ts, const NameOf& name_of);

/// SYSTEM ROUND_START: level, round, starting gold (all 1-based for level/round).
LogRecord round_start_record(const GameState& state, std::optional<std::int64_t> ts);

/// SYSTEM ROUND_RESULT: outcome, unspent, points, health, score.
LogRecord round_result_record(const GameState& state, double score, std::optional<std::int64_t> ts);

std::string upper(std::string s);

}  // namespace taskforge::telemetry
