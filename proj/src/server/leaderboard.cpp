#include "taskforge/server/leaderboard.hpp"

#include <algorithm>
#include <fstream>

namespace taskforge::server {

double breakdown_score(const ScoreWeights& w, const LeaderboardEntry& e) {
  if (w.mode == ScoreMode::Binary) return e.won ? 1.0 : 0.0;
  return w.w_unspent * static_cast<double>(e.unspent) + w.w_points * static_cast<double>(e.points) +
         w.w_health * static_cast<double>(e.health);
}

std::vector<LeaderboardEntry> leaderboard_topk(std::vector<LeaderboardEntry> store, std::size_t k) {
  std::stable_sort(store.begin(), store.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.completed_ms < b.completed_ms;
  });
  if (store.size() > k) store.resize(k);
  return store;
}

nlohmann::json to_json(const LeaderboardEntry& e) {
  return {{"team_name", e.team_name}, {"level", e.level},     {"round", e.round},
          {"score", e.score},         {"unspent", e.unspent}, {"points", e.points},
          {"health", e.health},       {"won", e.won},         {"completed_ms", e.completed_ms}};
}

Expected<LeaderboardEntry, std::string> leaderboard_entry_from_json(const nlohmann::json& j) {
  if (!j.is_object()) return unexpected(std::string("entry is not an object"));
  try {
    LeaderboardEntry e;
    e.team_name = j.at("team_name").get<std::string>();
    e.level = j.at("level").get<int>();
    e.round = j.at("round").get<int>();
    e.score = j.at("score").get<double>();
    e.unspent = j.at("unspent").get<std::int64_t>();
    e.points = j.at("points").get<std::int64_t>();
    e.health = j.at("health").get<std::int64_t>();
    e.won = j.value("won", false);
    e.completed_ms = j.at("completed_ms").get<std::int64_t>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    return unexpected(std::string(ex.what()));
  }
}

void append_leaderboard(const std::filesystem::path& file, const LeaderboardEntry& e) {
  std::ofstream out(file, std::ios::app);
  out << to_json(e).dump() << '\n';
}

Expected<std::vector<LeaderboardEntry>, std::string> load_leaderboard(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return unexpected("cannot open " + file.string());
  std::vector<LeaderboardEntry> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    auto e = leaderboard_entry_from_json(j);
    if (!e) return unexpected("line " + std::to_string(n) + ": " + (j.is_discarded() ? "not JSON" : e.error()));
    out.push_back(std::move(*e));
  }
  return out;
}

}  // namespace taskforge::server
