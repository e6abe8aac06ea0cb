#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taskforge/sim/game.hpp"
#include "taskforge/util/expected.hpp"

namespace taskforge::server {

/// Everything the room fed to the sim, in order. Replaying it offline reproduces every digest.
/// Ops, one JSON object each:
///   {"op":"session", room, team_name, seed}
///   {"op":"init", level, round, participating}
///   {"op":"cmd", cmd: intent payload, ok, error}
///   {"op":"plan", n} / {"op":"tick", n}       run-length planning or attack ticks
///   {"op":"end", digest, event_digest}
class IntentLog {
 public:
  void session(const std::string& room, const std::string& team_name, std::uint64_t seed);
  void init(const GameState& state);
  void command(const Command& c, const Expected<Events, CommandError>& result);
  void planning_tick();
  void attack_tick();
  void end(const std::string& digest, const std::string& event_digest);

  const std::vector<nlohmann::json>& ops() const { return ops_; }
  std::string text() const;  // JSON lines

  /// Appends ops not yet written to `file`.
  void flush_to(const std::filesystem::path& file);

 private:
  void run(const char* op);

  std::vector<nlohmann::json> ops_;
  std::size_t written_ = 0;
};

struct ReplayedRound {
  int level = 0;
  int round = 0;
  std::string recorded_digest;
  std::string replayed_digest;
  std::string recorded_event_digest;
  std::string replayed_event_digest;

  bool matches() const {
    return recorded_digest == replayed_digest && recorded_event_digest == replayed_event_digest;
  }
};

/// Re-runs the ops through the sim. Fails if a command's outcome differs from the recorded one.
Expected<std::vector<ReplayedRound>, std::string> replay(std::shared_ptr<const SessionConfig> config,
                                                         const std::vector<nlohmann::json>& ops);
Expected<std::vector<nlohmann::json>, std::string> parse_intent_log(std::string_view text);

}  // namespace taskforge::server
