#pragma once

#include <atomic>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>

#include <boost/asio/io_context.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>

#include "taskforge/config/config.hpp"
#include "taskforge/server/room.hpp"

namespace taskforge::server {

namespace asio = boost::asio;

/// A connection's handle on its member record; written and read only on the room strand.
struct Binding {
  int member = -1;
};

using JoinDone = std::function<void(const Expected<JoinResult, JoinError>&)>;

/// Runs one RoomCore on its own strand: intents queue in arrival order and a timer advances the
/// room at the tick rate times `time_scale`.
class Room : public std::enable_shared_from_this<Room> {
 public:
  Room(asio::io_context& io, std::unique_ptr<RoomCore> core, double time_scale);
  ~Room();

  const std::string& key() const { return key_; }

  void join(std::string name, Role role, SendFn send, std::shared_ptr<Binding> binding, JoinDone done);
  void rejoin(std::string token, SendFn send, std::shared_ptr<Binding> binding, JoinDone done);
  void submit(std::shared_ptr<Binding> binding, Envelope msg);
  /// A frame from a joined member that did not decode.
  void malformed(std::shared_ptr<Binding> binding, std::string why);
  void disconnect(std::shared_ptr<Binding> binding);

  /// Runs `f` on the room strand and waits for it. Not for use from the strand itself.
  template <class F>
  auto inspect(F f) -> decltype(f(std::declval<RoomCore&>())) {
    using R = decltype(f(std::declval<RoomCore&>()));
    std::packaged_task<R()> task([this, &f] { return f(*core_); });
    auto fut = task.get_future();
    asio::post(strand_, [&task] { task(); });
    return fut.get();
  }

  struct Stats {
    SessionPhase phase = SessionPhase::Lobby;
    int players = 0;
    int observers = 0;
    int connected = 0;
  };
  Stats stats() const;

  /// Stops the clock and closes the room's files.
  void shutdown();

 private:
  void after_change();
  void arm();
  void on_timer();
  void refresh_stats();

  asio::strand<asio::io_context::executor_type> strand_;
  asio::steady_timer timer_;
  std::unique_ptr<RoomCore> core_;
  std::string key_;
  std::chrono::nanoseconds period_;
  bool ticking_ = false;
  bool stopped_ = false;

  std::atomic<int> phase_{0};
  std::atomic<int> players_{0};
  std::atomic<int> observers_{0};
  std::atomic<int> connected_{0};
};

struct RegistryOptions {
  double time_scale = 1.0;
  RoomOptions room;
  std::string log_sink;                    // telemetry endpoint; empty keeps logs local
  telemetry::SinkConfig sink;              // batching and retry; endpoint is taken from log_sink
  bool telemetry = false;                  // write session logs even without persist_dir or log_sink
  std::optional<std::uint64_t> seed;       // key and team-name RNG; random_device when unset
  std::function<std::string()> key_source; // overrides key generation (tests)
  std::shared_ptr<TokenIssuer> tokens;
};

struct CreatedRoom {
  std::string key;
  std::string token;
  std::optional<int> slot;
  std::string color;
  std::string team_name;
};

struct HealthCounts {
  int rooms = 0;
  int lobby = 0;
  int in_game = 0;
  int between_rounds = 0;
  int finished = 0;
  int players = 0;
  int observers = 0;
  int connected = 0;
};

/// Live rooms by key. Thread-safe.
class Registry {
 public:
  explicit Registry(asio::io_context& io, RegistryOptions options = {});
  ~Registry();

  /// Validates the config; the host becomes the first member.
  Expected<CreatedRoom, std::vector<std::string>> create_room(const std::string& host_name, SessionConfig config,
                                                              Role host_role = Role::Player);
  std::shared_ptr<Room> find(std::string_view key) const;
  bool remove(std::string_view key);
  std::size_t size() const;
  HealthCounts counts() const;
  void shutdown();

  const RegistryOptions& options() const { return options_; }

 private:
  std::string fresh_key_locked();

  asio::io_context& io_;
  RegistryOptions options_;
  mutable std::mutex mu_;
  std::mt19937_64 rng_;
  std::map<std::string, std::shared_ptr<Room>, std::less<>> rooms_;
};

/// [A-Z0-9]{6}
bool valid_room_key(std::string_view key);

}  // namespace taskforge::server
