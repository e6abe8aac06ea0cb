#include "taskforge/telemetry/event_records.hpp"

#include <cctype>
#include <cstdio>

namespace taskforge::telemetry {

namespace {

std::string real(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::vector<LogRecord> event_records(const Events& events, std::optional<std::int64_t> ts, const NameOf& name_of) {
  std::vector<LogRecord> out;
  for (const auto& e : events) {
    const Cell at = e.cell.value_or(Cell{});
    switch (e.kind) {
      case EventKind::Placed:
        out.push_back(action(ts, ActionKind::Buy, upper(e.subject), at, name_of(e.actor)));
        break;
      case EventKind::Sold:
        out.push_back(action(ts, ActionKind::Sell, upper(e.subject), at, name_of(e.actor)));
        break;
      case EventKind::Upgraded:
        out.push_back(upgrade(ts, upper(e.subject), upper(e.detail), e.level, at, name_of(e.actor)));
        break;
      case EventKind::Killed:
        out.push_back(system(ts, "KILL",
                             {{"tick", std::to_string(e.tick)},
                              {"enemy", e.subject},
                              {"bounty", std::to_string(e.amount)},
                              {"points", std::to_string(e.points)}}));
        break;
      case EventKind::Leaked:
        out.push_back(system(ts, "LEAK", {{"tick", std::to_string(e.tick)}, {"enemy", e.subject}}));
        break;
      case EventKind::PhaseChanged:
        out.push_back(system(ts, "PHASE", {{"tick", std::to_string(e.tick)}, {"phase", e.detail}}));
        break;
      case EventKind::RoundEnded:
        out.push_back(system(ts, "ROUND_END", {{"tick", std::to_string(e.tick)}, {"outcome", e.detail}}));
        break;
      case EventKind::Spawned:
        break;
    }
  }
  return out;
}

LogRecord round_start_record(const GameState& state, std::optional<std::int64_t> ts) {
  return system(ts, "ROUND_START",
                {{"level", std::to_string(state.level_index + 1)},
                 {"round", std::to_string(state.round_index + 1)},
                 {"gold", std::to_string(state.level().starting_gold)},
                 {"health", std::to_string(state.level().starting_health)}});
}

LogRecord round_result_record(const GameState& state, double score, std::optional<std::int64_t> ts) {
  return system(ts, "ROUND_RESULT",
                {{"level", std::to_string(state.level_index + 1)},
                 {"round", std::to_string(state.round_index + 1)},
                 {"outcome", std::string(to_string(state.outcome))},
                 {"unspent", std::to_string(state.total_money())},
                 {"points", std::to_string(state.kill_points)},
                 {"health", std::to_string(state.health)},
                 {"kills", std::to_string(state.ledger.kills)},
                 {"leaks", std::to_string(state.ledger.leaks)},
                 {"score", real(score)}});
}

}  // namespace taskforge::telemetry
