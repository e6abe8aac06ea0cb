#include "sessions.hpp"

#include <random>

#include "scenarios.hpp"
#include "taskforge/sim/autoplay.hpp"
#include "taskforge/telemetry/event_records.hpp"

namespace taskforge::testkit {

GeneratedSession generate_session(std::shared_ptr<const SessionConfig> cfg, std::uint64_t seed, int max_rounds) {
  using namespace telemetry;
  GeneratedSession out;
  std::mt19937_64 rng(seed);
  std::int64_t clock = 1714564800000;
  auto name_of = [](int slot) { return "player" + std::to_string(slot); };
  auto log_events = [&](const Events& ev) {
    clock += 50;
    for (auto& r : event_records(ev, clock, name_of)) {
      out.buys += r.kind == RecordKind::Action && r.action == ActionKind::Buy;
      out.log.push_back(std::move(r));
    }
  };
  auto maybe_chat = [&] {
    if (rng() % 5 != 0) return;
    static const char* lines[] = {"gogogo", "put a slow near the bend", "ok", "50 seconds D:", "haha okay",
                                  "what does the diamond tower do?", "k i maxed"};
    const int slot = static_cast<int>(rng() % static_cast<std::uint64_t>(cfg->slot_count()));
    out.log.push_back(chat(clock, name_of(slot), lines[rng() % std::size(lines)]));
    ++out.chats;
  };

  int played = 0;
  for (int level = 0; level < static_cast<int>(cfg->levels.size()); ++level) {
    for (int round = 0; round < cfg->rounds_per_level && played < max_rounds; ++round, ++played) {
      GameState s = init_game(cfg, level, round);
      out.log.push_back(round_start_record(s, clock));
      const auto plan = scripted_plan(s, 0.3 + 0.1 * static_cast<double>(rng() % 4));
      for (const auto& c : plan) {
        if (c.kind == CommandKind::Ready) continue;
        if (auto r = apply_command(s, c)) log_events(*r);
        maybe_chat();
      }
      for (int i = 0; i < 30; ++i) {
        auto c = random_command(s, rng);
        if (c.kind == CommandKind::Ready) continue;
        if (auto r = apply_command(s, c)) log_events(*r);
        maybe_chat();
      }
      for (int slot = 0; slot < cfg->slot_count() && s.phase == Phase::Planning; ++slot) {
        if (auto r = apply_command(s, {.issuer = slot, .kind = CommandKind::Ready})) log_events(*r);
      }
      while (s.phase == Phase::Planning) log_events(planning_tick(s));
      while (s.phase == Phase::Attack) {
        if (cfg->interact_during_attack && rng() % 40 == 0) {
          if (auto r = apply_command(s, random_command(s, rng))) log_events(*r);
        }
        log_events(tick(s));
        if (s.tick % 100 == 0) maybe_chat();
      }
      out.log.push_back(round_result_record(s, compute_score(s, cfg->score), clock));
      out.final_money.push_back(s.total_money());
    }
  }
  return out;
}

}  // namespace taskforge::testkit
