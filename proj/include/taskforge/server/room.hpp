#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "taskforge/server/intent_log.hpp"
#include "taskforge/server/leaderboard.hpp"
#include "taskforge/server/wire.hpp"
#include "taskforge/sim/digest.hpp"
#include "taskforge/telemetry/sink.hpp"

namespace taskforge::server {

enum class Role : std::uint8_t { Player, Observer };
enum class SessionPhase : std::uint8_t { Lobby, InGame, BetweenRounds, Finished };

std::string_view to_string(Role r);
std::optional<Role> parse_role(std::string_view s);
std::string_view to_string(SessionPhase p);

/// Issues session tokens. The default draws 128 bits from std::random_device.
class TokenIssuer {
 public:
  virtual ~TokenIssuer() = default;
  virtual std::string issue() = 0;
};

class RandomTokenIssuer final : public TokenIssuer {
 public:
  std::string issue() override;
};

/// Adjective-animal pair drawn from a bundled list with the given seed.
std::string suggest_team_name(std::uint64_t seed);

/// Delivers one encoded message to a connection. Empty while the member is disconnected.
using SendFn = std::function<void(std::string line)>;

struct RoomOptions {
  double intermission_seconds = 10.0;
  int countdown_ticks = kTickRate;      // planning countdown broadcast period
  int delta_ticks = kTickRate / 10;     // attack delta coalescing period
  int snapshot_ticks = 5 * kTickRate;   // periodic full snapshot during attack
  std::size_t leaderboard_k = 10;
  std::filesystem::path persist_dir;    // leaderboard and intent log files; empty keeps them in memory
};

struct JoinResult {
  int member = -1;
  Role role = Role::Player;
  std::optional<int> slot;
  std::string color;
  std::string token;
};

enum class JoinError : std::uint8_t { UnknownRoom, RoomFull, EmptyName, BadToken, NotInLobby, Finished };
std::string_view error_code(JoinError e);
std::string_view error_message(JoinError e);

/// Room logic with no clock or sockets of its own. The owner calls every method from one
/// logical thread: intents in arrival order, advance() once per sim tick while running().
class RoomCore {
 public:
  struct Member {
    std::string name;
    Role role = Role::Player;
    std::optional<int> slot;
    std::string token;
    bool host = false;
    bool connected = false;
    SendFn send;
    std::int64_t next_seq = 1;
  };

  RoomCore(std::string key, std::shared_ptr<const SessionConfig> config, std::uint64_t seed, RoomOptions options = {},
           std::shared_ptr<TokenIssuer> tokens = nullptr, std::shared_ptr<telemetry::SessionSink> sink = nullptr);
  ~RoomCore();

  RoomCore(const RoomCore&) = delete;
  RoomCore& operator=(const RoomCore&) = delete;

  /// The first member to join is the host.
  Expected<JoinResult, JoinError> join(const std::string& name, Role role, SendFn send);
  /// Restores the member holding `token`, same slot and color.
  Expected<JoinResult, JoinError> rejoin(const std::string& token, SendFn send);
  void disconnect(int member);

  /// One client message from `member`. Every message is answered with an ack or an ERROR.
  void handle(int member, const Envelope& msg);
  /// A frame from `member` that did not decode.
  void malformed(int member, std::string_view why);

  /// Advances the room clock by one tick.
  void advance();
  bool running() const { return phase_ == SessionPhase::InGame || phase_ == SessionPhase::BetweenRounds; }

  const std::string& key() const { return key_; }
  const std::string& team_name() const { return team_name_; }
  std::uint64_t seed() const { return seed_; }
  SessionPhase phase() const { return phase_; }
  const std::optional<GameState>& game() const { return game_; }
  const std::vector<Member>& members() const { return members_; }
  const IntentLog& intent_log() const { return log_; }
  const std::vector<LeaderboardEntry>& leaderboard() const { return board_; }
  std::shared_ptr<const SessionConfig> config() const { return config_; }
  int rounds_played() const { return rounds_played_; }
  /// Closes the telemetry sink and writes outstanding files.
  void close();

 private:
  struct Outgoing {
    std::string_view type;
    json payload;
  };

  void send_to(int member, std::string_view type, json payload);
  void broadcast(std::string_view type, const json& payload, int acked_member = -1, std::int64_t ack = 0);
  void error_to(int member, std::int64_t ack, std::string_view code, std::string_view message);
  json lobby_json() const;
  json delta_json(const Events& events) const;
  void broadcast_lobby(int acked_member = -1, std::int64_t ack = 0);

  void start_round();
  void finish_round();
  void flush_pending();
  void on_events(const Events& events);
  void game_intent(int member, const Envelope& msg);
  void chat(int member, const Envelope& msg);
  std::string name_of(int slot) const;
  std::int64_t now_ms() const;
  void record(const telemetry::LogRecord& r);
  void record(const std::vector<telemetry::LogRecord>& rs);
  void persist();

  std::string key_;
  std::shared_ptr<const SessionConfig> config_;
  std::uint64_t seed_;
  RoomOptions options_;
  std::shared_ptr<TokenIssuer> tokens_;
  std::shared_ptr<telemetry::SessionSink> sink_;

  std::string team_name_;
  SessionPhase phase_ = SessionPhase::Lobby;
  std::vector<Member> members_;
  std::vector<int> slot_member_;  // member index per slot, -1 when free

  int level_ = 0;
  int round_ = 0;
  int rounds_played_ = 0;
  std::optional<GameState> game_;
  EventDigest round_digest_;
  Events pending_;
  int attack_ticks_ = 0;
  int intermission_ticks_ = 0;
  IntentLog log_;
  std::vector<LeaderboardEntry> board_;
  bool closed_ = false;
};

}  // namespace taskforge::server
