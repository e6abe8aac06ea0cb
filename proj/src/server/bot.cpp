#include "taskforge/server/bot.hpp"

#include "taskforge/config/config.hpp"
#include "taskforge/server/client.hpp"
#include "taskforge/sim/autoplay.hpp"

namespace taskforge::server {

namespace {

int seated(const json& lobby) {
  int n = 0;
  for (const auto& p : lobby.value("players", json::array())) n += !p["name"].is_null();
  return n;
}

}  // namespace

BotReport run_bot(const std::string& host, unsigned short port, const std::string& room, const BotOptions& opt) {
  BotReport rep;
  WsClient ws;
  try {
    ws.connect(host, port);
  } catch (const std::exception& e) {
    rep.error = std::string("connect: ") + e.what();
    return rep;
  }
  json join = opt.token.empty() ? json{{"name", opt.name}, {"role", to_string(opt.role)}} : json{{"token", opt.token}};
  ws.send(kJoin, join, room);

  std::shared_ptr<const SessionConfig> cfg;
  std::set<std::int64_t> mine;
  std::set<std::pair<int, int>> planned;
  bool started = false;

  for (;;) {
    auto e = ws.next(opt.timeout);
    if (!e) {
      rep.error = ws.closed() ? "connection closed" : "timed out";
      break;
    }
    const auto& p = e->payload;
    if (e->type == kError) {
      if (!cfg) {
        rep.error = "join failed: " + p.value("code", std::string());
        break;
      }
      if (p.contains("ack") && mine.count(p["ack"].get<std::int64_t>())) ++rep.rejected;
      continue;
    }
    if (p.contains("ack") && mine.count(p["ack"].get<std::int64_t>())) ++rep.accepted;

    if (e->type == kLobbyState) {
      if (!cfg) {
        auto parsed = parse_config(p["config"].dump());
        if (!parsed) {
          rep.error = "config in LOBBY_STATE does not parse";
          break;
        }
        cfg = std::make_shared<const SessionConfig>(std::move(*parsed));
        if (p["you"].contains("slot")) rep.slot = p["you"]["slot"].get<int>();
        rep.token = p["you"]["token"].get<std::string>();
      }
      if (opt.start && !started && p["session_phase"] == "LOBBY" && seated(p) >= opt.wait_players) {
        started = true;
        mine.insert(ws.send(kStart, json::object(), room));
      }
      if (p["session_phase"] == "FINISHED") {
        rep.finished = true;
        break;
      }
    } else if (e->type == kGameSnapshot && cfg && rep.slot && opt.role == Role::Player) {
      const int level = p["level"].get<int>();
      const int round = p["round"].get<int>();
      if (p["phase"] != "PLANNING" || planned.count({level, round})) continue;
      planned.insert({level, round});
      GameState s = init_game(cfg, level, round);
      s.participating = p["participating"].get<std::vector<bool>>();
      if (rep.rounds < static_cast<int>(opt.chat.size())) {
        mine.insert(ws.send(kChat, {{"text", opt.chat[static_cast<std::size_t>(rep.rounds)]}}, room));
      }
      for (const auto& c : scripted_plan_for(s, *rep.slot, opt.reserve)) {
        mine.insert(ws.send(intent_type(c.kind), intent_payload(c), room));
      }
    } else if (e->type == kRoundResult) {
      rep.results.push_back(p);
      if (++rep.rounds == opt.max_rounds) break;
    }
  }
  ws.close();
  rep.received = ws.history();
  return rep;
}

}  // namespace taskforge::server
