#include "taskforge/server/room.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "taskforge/config/config.hpp"
#include "taskforge/telemetry/event_records.hpp"

namespace taskforge::server {

namespace {

constexpr std::size_t kMaxTeamName = 40;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string text_field(const json& p, const char* key) {
  return p.contains(key) && p[key].is_string() ? p[key].get<std::string>() : std::string();
}

}  // namespace

std::string_view to_string(Role r) { return r == Role::Player ? "PLAYER" : "OBSERVER"; }

std::optional<Role> parse_role(std::string_view s) {
  if (s == "PLAYER") return Role::Player;
  if (s == "OBSERVER") return Role::Observer;
  return std::nullopt;
}

std::string_view to_string(SessionPhase p) {
  switch (p) {
    case SessionPhase::Lobby: return "LOBBY";
    case SessionPhase::InGame: return "IN_GAME";
    case SessionPhase::BetweenRounds: return "BETWEEN_ROUNDS";
    case SessionPhase::Finished: return "FINISHED";
  }
  return "?";
}

std::string_view error_code(JoinError e) {
  switch (e) {
    case JoinError::UnknownRoom: return "unknown_room";
    case JoinError::RoomFull: return "room_full";
    case JoinError::EmptyName: return "empty_name";
    case JoinError::BadToken: return "bad_token";
    case JoinError::NotInLobby: return "not_in_lobby";
    case JoinError::Finished: return "session_finished";
  }
  return "?";
}

std::string_view error_message(JoinError e) {
  switch (e) {
    case JoinError::UnknownRoom: return "unknown room key";
    case JoinError::RoomFull: return "room full";
    case JoinError::EmptyName: return "name empty";
    case JoinError::BadToken: return "unknown session token";
    case JoinError::NotInLobby: return "players can only join in the lobby";
    case JoinError::Finished: return "session finished";
  }
  return "?";
}

std::string RandomTokenIssuer::issue() {
  std::random_device rd;
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (int i = 0; i < 4; ++i) {
    std::uint32_t v = rd();
    for (int k = 0; k < 8; ++k, v >>= 4) out += hex[v & 0xf];
  }
  return out;
}

std::string suggest_team_name(std::uint64_t seed) {
  static const char* const adjectives[] = {
      "Amber",  "Brave",  "Clever", "Dapper", "Eager",  "Fuzzy",  "Gentle", "Hasty",  "Jolly",  "Keen",
      "Lucky",  "Mighty", "Nimble", "Plucky", "Quiet",  "Rapid",  "Sunny",  "Tidy",   "Upbeat", "Vivid",
      "Witty",  "Zesty",  "Bold",   "Calm",   "Daring", "Fierce", "Golden", "Humble", "Mellow", "Swift"};
  static const char* const animals[] = {
      "Otters",   "Badgers", "Falcons", "Lynxes",  "Herons",   "Wombats", "Foxes",   "Ravens",  "Pandas",  "Tapirs",
      "Geckos",   "Bison",   "Koalas",  "Marmots", "Puffins",  "Quokkas", "Ibexes",  "Jackals", "Lemurs",  "Newts",
      "Ocelots",  "Pumas",   "Seals",   "Toucans", "Walruses", "Yaks",    "Zebras",  "Cranes",  "Dingoes", "Egrets"};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> a(0, std::size(adjectives) - 1);
  std::uniform_int_distribution<std::size_t> b(0, std::size(animals) - 1);
  const std::string first = adjectives[a(rng)];
  return first + " " + animals[b(rng)];
}

RoomCore::RoomCore(std::string key, std::shared_ptr<const SessionConfig> config, std::uint64_t seed,
                   RoomOptions options, std::shared_ptr<TokenIssuer> tokens,
                   std::shared_ptr<telemetry::SessionSink> sink)
    : key_(std::move(key)),
      config_(std::move(config)),
      seed_(seed),
      options_(std::move(options)),
      tokens_(tokens ? std::move(tokens) : std::make_shared<RandomTokenIssuer>()),
      sink_(std::move(sink)),
      team_name_(suggest_team_name(seed)),
      slot_member_(static_cast<std::size_t>(config_->slot_count()), -1) {
  log_.session(key_, team_name_, seed_);
  record(telemetry::system(now_ms(), "SESSION",
                           {{"room", key_}, {"team_name", team_name_}, {"seed", std::to_string(seed_)},
                            {"mode", std::string(to_string(config_->mode))}}));
}

RoomCore::~RoomCore() { close(); }

void RoomCore::close() {
  if (closed_) return;
  closed_ = true;
  persist();
  if (sink_) sink_->close();
}

std::int64_t RoomCore::now_ms() const {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

void RoomCore::record(const telemetry::LogRecord& r) {
  if (sink_) sink_->record(r);
}

void RoomCore::record(const std::vector<telemetry::LogRecord>& rs) {
  if (sink_ && !rs.empty()) sink_->record(rs);
}

void RoomCore::persist() {
  if (options_.persist_dir.empty()) return;
  std::filesystem::create_directories(options_.persist_dir);
  log_.flush_to(options_.persist_dir / (key_ + "_intents.jsonl"));
}

std::string RoomCore::name_of(int slot) const {
  if (slot >= 0 && slot < static_cast<int>(slot_member_.size()) && slot_member_[static_cast<std::size_t>(slot)] >= 0) {
    return members_[static_cast<std::size_t>(slot_member_[static_cast<std::size_t>(slot)])].name;
  }
  return "slot" + std::to_string(slot);
}

// ---- membership -------------------------------------------------------------

Expected<JoinResult, JoinError> RoomCore::join(const std::string& raw_name, Role role, SendFn send) {
  const auto name = trim(raw_name);
  if (name.empty()) return unexpected(JoinError::EmptyName);
  if (phase_ == SessionPhase::Finished) return unexpected(JoinError::Finished);
  std::optional<int> slot;
  if (role == Role::Player) {
    if (phase_ != SessionPhase::Lobby) return unexpected(JoinError::NotInLobby);
    for (int s = 0; s < static_cast<int>(slot_member_.size()); ++s) {
      if (slot_member_[static_cast<std::size_t>(s)] < 0) {
        slot = s;
        break;
      }
    }
    if (!slot) return unexpected(JoinError::RoomFull);
  }
  Member m;
  m.name = name;
  m.role = role;
  m.slot = slot;
  m.token = tokens_->issue();
  m.host = members_.empty();
  m.connected = static_cast<bool>(send);
  m.send = std::move(send);
  const int id = static_cast<int>(members_.size());
  members_.push_back(std::move(m));
  if (slot) slot_member_[static_cast<std::size_t>(*slot)] = id;

  std::vector<std::pair<std::string, std::string>> attrs{{"name", name}, {"role", std::string(to_string(role))}};
  if (slot) attrs.push_back({"slot", std::to_string(*slot)});
  record(telemetry::system(now_ms(), "JOIN", std::move(attrs)));
  broadcast_lobby();
  if (game_) send_to(id, kGameSnapshot, snapshot_json(*game_));

  JoinResult r;
  r.member = id;
  r.role = role;
  r.slot = slot;
  if (slot) r.color = config_->team[static_cast<std::size_t>(*slot)].color;
  r.token = members_.back().token;
  return r;
}

Expected<JoinResult, JoinError> RoomCore::rejoin(const std::string& token, SendFn send) {
  for (std::size_t i = 0; i < members_.size(); ++i) {
    auto& m = members_[i];
    if (token.empty() || m.token != token) continue;
    m.send = std::move(send);
    m.connected = static_cast<bool>(m.send);
    record(telemetry::system(now_ms(), "REJOIN", {{"name", m.name}}));
    broadcast_lobby();
    if (game_) send_to(static_cast<int>(i), kGameSnapshot, snapshot_json(*game_));
    JoinResult r;
    r.member = static_cast<int>(i);
    r.role = m.role;
    r.slot = m.slot;
    if (m.slot) r.color = config_->team[static_cast<std::size_t>(*m.slot)].color;
    r.token = m.token;
    return r;
  }
  return unexpected(JoinError::BadToken);
}

void RoomCore::disconnect(int member) {
  if (member < 0 || member >= static_cast<int>(members_.size())) return;
  auto& m = members_[static_cast<std::size_t>(member)];
  if (!m.connected) return;
  m.connected = false;
  m.send = nullptr;
  record(telemetry::system(now_ms(), "LEAVE", {{"name", m.name}}));
  broadcast_lobby();
}

// ---- outgoing -----------------------------------------------------------------

void RoomCore::send_to(int member, std::string_view type, json payload) {
  auto& m = members_[static_cast<std::size_t>(member)];
  if (!m.connected || !m.send) return;
  Envelope e;
  e.seq = m.next_seq++;
  e.type = type;
  e.room = key_;
  e.payload = std::move(payload);
  m.send(encode(e));
}

void RoomCore::broadcast(std::string_view type, const json& payload, int acked_member, std::int64_t ack) {
  for (int i = 0; i < static_cast<int>(members_.size()); ++i) {
    json p = payload;
    if (i == acked_member) p["ack"] = ack;
    send_to(i, type, std::move(p));
  }
}

void RoomCore::error_to(int member, std::int64_t ack, std::string_view code, std::string_view message) {
  send_to(member, kError, {{"ack", ack}, {"code", code}, {"message", message}});
}

json RoomCore::lobby_json() const {
  json players = json::array();
  for (int s = 0; s < static_cast<int>(slot_member_.size()); ++s) {
    const auto& a = config_->team[static_cast<std::size_t>(s)];
    json p{{"slot", s}, {"color", a.color}, {"agent", a.agent == AgentKind::Human ? "HUMAN" : "AI"}, {"towers", a.towers}};
    const int id = slot_member_[static_cast<std::size_t>(s)];
    if (id >= 0) {
      const auto& m = members_[static_cast<std::size_t>(id)];
      p["name"] = m.name;
      p["connected"] = m.connected;
      p["host"] = m.host;
    } else {
      p["name"] = nullptr;
    }
    if (game_ && static_cast<std::size_t>(s) < game_->ready.size()) p["ready"] = static_cast<bool>(game_->ready[static_cast<std::size_t>(s)]);
    players.push_back(std::move(p));
  }
  json observers = json::array();
  for (const auto& m : members_) {
    if (m.role == Role::Observer) observers.push_back({{"name", m.name}, {"connected", m.connected}, {"host", m.host}});
  }
  return {{"team_name", team_name_},
          {"session_phase", to_string(phase_)},
          {"level", level_},
          {"round", round_},
          {"levels", config_->levels.size()},
          {"rounds_per_level", config_->rounds_per_level},
          {"rounds_played", rounds_played_},
          {"players", std::move(players)},
          {"observers", std::move(observers)},
          {"config", json::parse(serialize_config(*config_))}};
}

void RoomCore::broadcast_lobby(int acked_member, std::int64_t ack) {
  const json base = lobby_json();
  for (int i = 0; i < static_cast<int>(members_.size()); ++i) {
    const auto& m = members_[static_cast<std::size_t>(i)];
    json p = base;
    p["you"] = {{"role", to_string(m.role)}, {"host", m.host}, {"name", m.name}, {"token", m.token}};
    if (m.slot) {
      p["you"]["slot"] = *m.slot;
      p["you"]["color"] = config_->team[static_cast<std::size_t>(*m.slot)].color;
    }
    if (i == acked_member) p["ack"] = ack;
    send_to(i, kLobbyState, std::move(p));
  }
}

json RoomCore::delta_json(const Events& events) const {
  const auto& s = *game_;
  json ev = json::array();
  for (const auto& e : events) ev.push_back(to_json(e));
  json j{{"level", s.level_index},
         {"round", s.round_index},
         {"tick", s.tick},
         {"phase", to_string(s.phase)},
         {"planning_remaining", s.planning_remaining()},
         {"money", s.money},
         {"health", s.health},
         {"kill_points", s.kill_points},
         {"ready", s.ready},
         {"events", std::move(ev)}};
  if (s.phase == Phase::Attack) {
    json enemies = json::array();
    for (const auto& e : s.enemies) {
      const auto p = enemy_position(s, e);
      enemies.push_back(json::array({e.spawn_index, p.x, p.y, e.health}));
    }
    j["enemies"] = std::move(enemies);
  }
  return j;
}

// ---- intents ------------------------------------------------------------------

void RoomCore::handle(int member, const Envelope& msg) {
  if (member < 0 || member >= static_cast<int>(members_.size())) return;
  const auto& m = members_[static_cast<std::size_t>(member)];
  const auto& t = msg.type;
  if (t == kPing) {
    send_to(member, kGameDelta, game_ ? [&] {
      auto d = delta_json({});
      d["ack"] = msg.seq;
      return d;
    }() : json{{"ack", msg.seq}, {"events", json::array()}});
  } else if (t == kJoin) {
    error_to(member, msg.seq, "already_joined", "already joined");
  } else if (t == kSetTeamName) {
    if (m.role != Role::Player) return error_to(member, msg.seq, "observer_forbidden", "observers cannot act");
    if (phase_ == SessionPhase::Finished) return error_to(member, msg.seq, "session_finished", "session finished");
    auto name = trim(text_field(msg.payload, "text"));
    if (name.empty()) name = trim(text_field(msg.payload, "team_name"));
    if (name.empty()) return error_to(member, msg.seq, "invalid_payload", "team name empty");
    if (name.size() > kMaxTeamName) name.resize(kMaxTeamName);
    team_name_ = name;
    record(telemetry::system(now_ms(), "TEAM_NAME", {{"team_name", team_name_}, {"by", m.name}}));
    broadcast_lobby(member, msg.seq);
  } else if (t == kChat) {
    chat(member, msg);
  } else if (t == kStart) {
    if (!m.host) return error_to(member, msg.seq, "not_host", "only the host can start");
    if (phase_ == SessionPhase::Lobby) {
      bool any = false;
      for (int id : slot_member_) any = any || id >= 0;
      if (!any) return error_to(member, msg.seq, "no_players", "no players joined");
      broadcast_lobby(member, msg.seq);
      start_round();
    } else if (phase_ == SessionPhase::BetweenRounds) {
      intermission_ticks_ = 0;
      broadcast_lobby(member, msg.seq);
      start_round();
    } else {
      error_to(member, msg.seq, "phase_violation", "nothing to start");
    }
  } else if (t == kPlace || t == kSell || t == kUpgrade || t == kReady || t == kSelect) {
    game_intent(member, msg);
  } else {
    error_to(member, msg.seq, "unknown_type", "unknown message type " + t);
  }
}

void RoomCore::malformed(int member, std::string_view why) {
  if (member < 0 || member >= static_cast<int>(members_.size())) return;
  error_to(member, 0, "bad_message", why);
}

void RoomCore::chat(int member, const Envelope& msg) {
  const auto& m = members_[static_cast<std::size_t>(member)];
  if (m.role != Role::Player) return error_to(member, msg.seq, "observer_forbidden", "observers cannot chat");
  if (!config_->comm.text_chat) return error_to(member, msg.seq, "chat_disabled", "text chat is off");
  if (!msg.payload.contains("text") || !msg.payload["text"].is_string()) {
    return error_to(member, msg.seq, "invalid_payload", "text missing");
  }
  auto records = telemetry::chat_records(now_ms(), m.name, msg.payload["text"].get<std::string>());
  const auto slot = *m.slot;
  json relay{{"slot", slot},
             {"name", m.name},
             {"color", config_->team[static_cast<std::size_t>(slot)].color},
             {"text", records.front().text},
             {"truncated", records.size() > 1}};
  record(records);
  broadcast(kChatRelay, relay, member, msg.seq);
}

void RoomCore::game_intent(int member, const Envelope& msg) {
  const auto& m = members_[static_cast<std::size_t>(member)];
  if (m.role != Role::Player) return error_to(member, msg.seq, "observer_forbidden", "observers cannot act");
  if (phase_ != SessionPhase::InGame || !game_) return error_to(member, msg.seq, "not_in_game", "no round in progress");
  auto cmd = command_from_intent(msg.type, msg.payload, *m.slot);
  if (!cmd) return error_to(member, msg.seq, error_code(CommandError::InvalidPayload), cmd.error());
  auto r = apply_command(*game_, *cmd);
  log_.command(*cmd, r);
  if (!r) return error_to(member, msg.seq, error_code(r.error()), error_message(r.error()));
  flush_pending();
  on_events(*r);
  auto d = delta_json(*r);
  broadcast(kGameDelta, d, member, msg.seq);
  if (game_->phase == Phase::Ended) finish_round();
}

// ---- round loop ---------------------------------------------------------------

void RoomCore::on_events(const Events& events) {
  if (events.empty()) return;
  round_digest_.add(events);
  record(telemetry::event_records(events, now_ms(), [this](int slot) { return name_of(slot); }));
}

void RoomCore::flush_pending() {
  if (!game_ || (pending_.empty() && game_->phase != Phase::Attack)) return;
  broadcast(kGameDelta, delta_json(pending_));
  pending_.clear();
}

void RoomCore::start_round() {
  game_ = init_game(config_, level_, round_);
  for (std::size_t s = 0; s < slot_member_.size(); ++s) game_->participating[s] = slot_member_[s] >= 0;
  round_digest_ = EventDigest{};
  pending_.clear();
  attack_ticks_ = 0;
  phase_ = SessionPhase::InGame;
  log_.init(*game_);
  record(telemetry::round_start_record(*game_, now_ms()));
  broadcast(kGameSnapshot, snapshot_json(*game_));
}

void RoomCore::advance() {
  if (phase_ == SessionPhase::BetweenRounds) {
    if (--intermission_ticks_ <= 0) start_round();
    return;
  }
  if (phase_ != SessionPhase::InGame || !game_) return;
  auto& s = *game_;
  if (s.phase == Phase::Planning) {
    if (config_->pause_planning_when_empty) {
      bool anyone = false;
      for (int id : slot_member_) anyone = anyone || (id >= 0 && members_[static_cast<std::size_t>(id)].connected);
      if (!anyone) return;
    }
    auto ev = planning_tick(s);
    log_.planning_tick();
    on_events(ev);
    if (!ev.empty() || s.planning_ticks_remaining % options_.countdown_ticks == 0) {
      broadcast(kGameDelta, delta_json(ev));
    }
  } else if (s.phase == Phase::Attack) {
    auto ev = tick(s);
    log_.attack_tick();
    on_events(ev);
    pending_.insert(pending_.end(), ev.begin(), ev.end());
    ++attack_ticks_;
    if (s.phase == Phase::Ended || attack_ticks_ % options_.delta_ticks == 0) flush_pending();
    if (s.phase != Phase::Ended && attack_ticks_ % options_.snapshot_ticks == 0) {
      broadcast(kGameSnapshot, snapshot_json(s));
    }
  }
  if (s.phase == Phase::Ended) finish_round();
}

void RoomCore::finish_round() {
  auto& s = *game_;
  const double score = compute_score(s, config_->score);
  const auto digest = state_digest(s);
  log_.end(digest, round_digest_.hex());

  LeaderboardEntry e;
  e.team_name = team_name_;
  e.level = s.level_index + 1;
  e.round = s.round_index + 1;
  e.score = score;
  e.unspent = s.total_money();
  e.points = s.kill_points;
  e.health = s.health;
  e.won = s.outcome == Outcome::Win;
  e.completed_ms = now_ms();
  board_.push_back(e);
  if (!options_.persist_dir.empty()) {
    std::filesystem::create_directories(options_.persist_dir);
    append_leaderboard(options_.persist_dir / (key_ + "_leaderboard.jsonl"), e);
  }
  record(telemetry::round_result_record(s, score, e.completed_ms));
  if (sink_) sink_->flush();

  json result{{"level", s.level_index},
              {"round", s.round_index},
              {"outcome", to_string(s.outcome)},
              {"score", score},
              {"breakdown", {{"unspent", e.unspent}, {"points", e.points}, {"health", e.health}}},
              {"kills", s.ledger.kills},
              {"leaks", s.ledger.leaks},
              {"team_name", team_name_},
              {"digest", digest},
              {"event_digest", round_digest_.hex()}};
  if (s.layout_score) result["layout_score"] = *s.layout_score;
  broadcast(kRoundResult, result);
  json entries = json::array();
  for (const auto& x : leaderboard_topk(board_, options_.leaderboard_k)) entries.push_back(to_json(x));
  broadcast(kLeaderboard, {{"entries", std::move(entries)}});

  ++rounds_played_;
  if (++round_ >= config_->rounds_per_level) {
    round_ = 0;
    ++level_;
  }
  if (level_ >= static_cast<int>(config_->levels.size())) {
    phase_ = SessionPhase::Finished;
    level_ = s.level_index;
    round_ = s.round_index;
  } else {
    phase_ = SessionPhase::BetweenRounds;
    intermission_ticks_ = static_cast<int>(std::lround(options_.intermission_seconds * kTickRate));
  }
  persist();
  broadcast_lobby();
  if (phase_ == SessionPhase::Finished && sink_) sink_->flush();
}

}  // namespace taskforge::server
