#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taskforge/config/session_config.hpp"
#include "taskforge/util/expected.hpp"

namespace taskforge::server {

struct LeaderboardEntry {
  std::string team_name;
  int level = 0;  // 1-based
  int round = 0;  // 1-based
  double score = 0.0;
  std::int64_t unspent = 0;
  std::int64_t points = 0;
  std::int64_t health = 0;
  bool won = false;
  std::int64_t completed_ms = 0;

  bool operator==(const LeaderboardEntry&) const = default;
};

/// Score the weights assign to this breakdown; equals compute_score on the final state.
double breakdown_score(const ScoreWeights& weights, const LeaderboardEntry& e);

/// Score descending, ties to the earlier completion. k larger than the store returns everything.
std::vector<LeaderboardEntry> leaderboard_topk(std::vector<LeaderboardEntry> store, std::size_t k);

nlohmann::json to_json(const LeaderboardEntry& e);
Expected<LeaderboardEntry, std::string> leaderboard_entry_from_json(const nlohmann::json& j);

/// One JSON object per line, appended.
void append_leaderboard(const std::filesystem::path& file, const LeaderboardEntry& e);
Expected<std::vector<LeaderboardEntry>, std::string> load_leaderboard(const std::filesystem::path& file);

}  // namespace taskforge::server
