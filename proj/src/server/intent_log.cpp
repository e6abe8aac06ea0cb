#include "taskforge/server/intent_log.hpp"

#include <fstream>
#include <sstream>

#include "taskforge/server/wire.hpp"
#include "taskforge/sim/digest.hpp"

namespace taskforge::server {

void IntentLog::session(const std::string& room, const std::string& team_name, std::uint64_t seed) {
  ops_.push_back({{"op", "session"}, {"room", room}, {"team_name", team_name}, {"seed", seed}});
}

void IntentLog::init(const GameState& s) {
  ops_.push_back({{"op", "init"}, {"level", s.level_index}, {"round", s.round_index},
                  {"participating", s.participating}});
}

void IntentLog::command(const Command& c, const Expected<Events, CommandError>& result) {
  nlohmann::json op{{"op", "cmd"}, {"cmd", intent_payload(c)}, {"ok", result.has_value()}};
  if (!result) op["error"] = error_code(result.error());
  ops_.push_back(std::move(op));
}

void IntentLog::run(const char* op) {
  if (ops_.size() > written_ && ops_.back()["op"] == op) {
    ops_.back()["n"] = ops_.back()["n"].get<long>() + 1;
  } else {
    ops_.push_back({{"op", op}, {"n", 1}});
  }
}

void IntentLog::planning_tick() { run("plan"); }
void IntentLog::attack_tick() { run("tick"); }

void IntentLog::end(const std::string& digest, const std::string& event_digest) {
  ops_.push_back({{"op", "end"}, {"digest", digest}, {"event_digest", event_digest}});
}

std::string IntentLog::text() const {
  std::string out;
  for (const auto& op : ops_) out += op.dump() + "\n";
  return out;
}

void IntentLog::flush_to(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::app);
  for (; written_ < ops_.size(); ++written_) out << ops_[written_].dump() << '\n';
}

Expected<std::vector<nlohmann::json>, std::string> parse_intent_log(std::string_view text) {
  std::vector<nlohmann::json> ops;
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("op")) {
      return unexpected("line " + std::to_string(n) + ": not an op");
    }
    ops.push_back(std::move(j));
  }
  return ops;
}

Expected<std::vector<ReplayedRound>, std::string> replay(std::shared_ptr<const SessionConfig> config,
                                                         const std::vector<nlohmann::json>& ops) {
  std::vector<ReplayedRound> out;
  std::optional<GameState> s;
  EventDigest digest;
  std::size_t i = 0;
  auto fail = [&](const std::string& m) {
    return unexpected("op " + std::to_string(i + 1) + ": " + m);
  };
  try {
    for (; i < ops.size(); ++i) {
      const auto& op = ops[i];
      const auto kind = op.at("op").get<std::string>();
      if (kind == "session") continue;
      if (kind == "init") {
        s = init_game(config, op.at("level").get<int>(), op.at("round").get<int>());
        s->participating = op.at("participating").get<std::vector<bool>>();
        digest = EventDigest{};
        continue;
      }
      if (!s) return fail("no round in progress");
      if (kind == "cmd") {
        const auto& p = op.at("cmd");
        auto c = command_from_intent(p.at("kind").get<std::string>(), p, p.at("player").get<int>());
        if (!c) return fail(c.error());
        auto r = apply_command(*s, *c);
        const bool ok = op.at("ok").get<bool>();
        if (r.has_value() != ok || (!r && error_code(r.error()) != op.value("error", std::string()))) {
          return fail("command outcome differs from the record");
        }
        if (r) digest.add(*r);
      } else if (kind == "plan" || kind == "tick") {
        const bool planning = kind == "plan";
        const long n = op.at("n").get<long>();
        for (long k = 0; k < n; ++k) {
          if ((s->phase == Phase::Planning) != planning) return fail("phase differs from the record");
          digest.add(planning ? planning_tick(*s) : tick(*s));
        }
      } else if (kind == "end") {
        ReplayedRound r;
        r.level = s->level_index;
        r.round = s->round_index;
        r.recorded_digest = op.at("digest").get<std::string>();
        r.replayed_digest = state_digest(*s);
        r.recorded_event_digest = op.at("event_digest").get<std::string>();
        r.replayed_event_digest = digest.hex();
        out.push_back(std::move(r));
        s.reset();
      } else {
        return fail("unknown op " + kind);
      }
    }
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  return out;
}

}  // namespace taskforge::server
