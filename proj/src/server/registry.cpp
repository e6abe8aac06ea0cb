#include "taskforge/server/registry.hpp"

#include <boost/asio/post.hpp>

namespace taskforge::server {

namespace {

constexpr char kKeyAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

std::int64_t now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

}  // namespace

bool valid_room_key(std::string_view key) {
  if (key.size() != 6) return false;
  for (char c : key) {
    if (!((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'))) return false;
  }
  return true;
}

// ---- Room ---------------------------------------------------------------------

Room::Room(asio::io_context& io, std::unique_ptr<RoomCore> core, double time_scale)
    : strand_(asio::make_strand(io)),
      timer_(strand_),
      core_(std::move(core)),
      key_(core_->key()),
      period_(std::chrono::nanoseconds(
          static_cast<std::int64_t>(1e9 * kTickSeconds / (time_scale > 0.0 ? time_scale : 1.0)))) {
  refresh_stats();
}

Room::~Room() = default;

void Room::refresh_stats() {
  int players = 0, observers = 0, connected = 0;
  for (const auto& m : core_->members()) {
    (m.role == Role::Player ? players : observers) += 1;
    connected += m.connected;
  }
  players_ = players;
  observers_ = observers;
  connected_ = connected;
  phase_ = static_cast<int>(core_->phase());
}

Room::Stats Room::stats() const {
  return {static_cast<SessionPhase>(phase_.load()), players_.load(), observers_.load(), connected_.load()};
}

void Room::after_change() {
  refresh_stats();
  if (!stopped_ && !ticking_ && core_->running()) {
    ticking_ = true;
    timer_.expires_after(period_);
    arm();
  }
}

void Room::arm() {
  timer_.async_wait([self = shared_from_this()](const boost::system::error_code& ec) {
    if (ec) return;
    self->on_timer();
  });
}

void Room::on_timer() {
  if (stopped_) return;
  core_->advance();
  refresh_stats();
  if (!core_->running()) {
    ticking_ = false;
    return;
  }
  timer_.expires_at(timer_.expiry() + period_);
  arm();
}

void Room::join(std::string name, Role role, SendFn send, std::shared_ptr<Binding> binding, JoinDone done) {
  asio::post(strand_, [self = shared_from_this(), name = std::move(name), role, send = std::move(send),
                       binding = std::move(binding), done = std::move(done)]() mutable {
    auto r = self->core_->join(name, role, std::move(send));
    if (r) binding->member = r->member;
    self->after_change();
    if (done) done(r);
  });
}

void Room::rejoin(std::string token, SendFn send, std::shared_ptr<Binding> binding, JoinDone done) {
  asio::post(strand_, [self = shared_from_this(), token = std::move(token), send = std::move(send),
                       binding = std::move(binding), done = std::move(done)]() mutable {
    auto r = self->core_->rejoin(token, std::move(send));
    if (r) binding->member = r->member;
    self->after_change();
    if (done) done(r);
  });
}

void Room::submit(std::shared_ptr<Binding> binding, Envelope msg) {
  asio::post(strand_, [self = shared_from_this(), binding = std::move(binding), msg = std::move(msg)] {
    if (binding->member < 0) return;
    self->core_->handle(binding->member, msg);
    self->after_change();
  });
}

void Room::malformed(std::shared_ptr<Binding> binding, std::string why) {
  asio::post(strand_, [self = shared_from_this(), binding = std::move(binding), why = std::move(why)] {
    if (binding->member < 0) return;
    self->core_->malformed(binding->member, why);
  });
}

void Room::disconnect(std::shared_ptr<Binding> binding) {
  asio::post(strand_, [self = shared_from_this(), binding = std::move(binding)] {
    if (binding->member < 0) return;
    self->core_->disconnect(binding->member);
    binding->member = -1;
    self->after_change();
  });
}

void Room::shutdown() {
  std::promise<void> done;
  asio::post(strand_, [this, &done] {
    stopped_ = true;
    timer_.cancel();
    core_->close();
    done.set_value();
  });
  done.get_future().wait();
}

// ---- Registry -----------------------------------------------------------------

Registry::Registry(asio::io_context& io, RegistryOptions options)
    : io_(io), options_(std::move(options)), rng_(options_.seed ? *options_.seed : std::random_device{}()) {
  if (!options_.tokens) options_.tokens = std::make_shared<RandomTokenIssuer>();
}

Registry::~Registry() = default;

std::string Registry::fresh_key_locked() {
  for (;;) {
    std::string key;
    if (options_.key_source) {
      key = options_.key_source();
    } else {
      std::uniform_int_distribution<int> d(0, 35);
      for (int i = 0; i < 6; ++i) key += kKeyAlphabet[d(rng_)];
    }
    if (valid_room_key(key) && !rooms_.count(key)) return key;
  }
}

Expected<CreatedRoom, std::vector<std::string>> Registry::create_room(const std::string& host_name,
                                                                      SessionConfig config, Role host_role) {
  if (auto issues = validate_config(config); !issues.empty()) {
    std::vector<std::string> out;
    for (const auto& i : issues) out.push_back(i.to_string());
    return unexpected(std::move(out));
  }
  auto cfg = std::make_shared<const SessionConfig>(std::move(config));
  std::lock_guard lock(mu_);
  const auto key = fresh_key_locked();
  const std::uint64_t seed = rng_();

  std::shared_ptr<telemetry::SessionSink> sink;
  const auto& dir = options_.room.persist_dir;
  if (!dir.empty() || !options_.log_sink.empty() || options_.telemetry) {
    const auto base = dir.empty() ? std::filesystem::temp_directory_path() / "taskforge" : dir;
    std::filesystem::create_directories(base);
    auto sc = options_.sink;
    sc.endpoint = options_.log_sink;
    const auto name = telemetry::session_log_name(key, now_ms());
    sink = std::make_shared<telemetry::SessionSink>(sc, key, base / name, base / (name + ".dead"));
  }
  auto core = std::make_unique<RoomCore>(key, cfg, seed, options_.room, options_.tokens, sink);
  auto host = core->join(host_name, host_role, nullptr);
  if (!host) return unexpected(std::vector<std::string>{std::string(error_message(host.error()))});
  CreatedRoom out{key, host->token, host->slot, host->color, core->team_name()};
  rooms_.emplace(key, std::make_shared<Room>(io_, std::move(core), options_.time_scale));
  return out;
}

std::shared_ptr<Room> Registry::find(std::string_view key) const {
  std::lock_guard lock(mu_);
  auto it = rooms_.find(key);
  return it == rooms_.end() ? nullptr : it->second;
}

bool Registry::remove(std::string_view key) {
  std::shared_ptr<Room> room;
  {
    std::lock_guard lock(mu_);
    auto it = rooms_.find(key);
    if (it == rooms_.end()) return false;
    room = it->second;
    rooms_.erase(it);
  }
  room->shutdown();
  return true;
}

std::size_t Registry::size() const {
  std::lock_guard lock(mu_);
  return rooms_.size();
}

HealthCounts Registry::counts() const {
  std::lock_guard lock(mu_);
  HealthCounts c;
  for (const auto& [key, room] : rooms_) {
    const auto s = room->stats();
    ++c.rooms;
    switch (s.phase) {
      case SessionPhase::Lobby: ++c.lobby; break;
      case SessionPhase::InGame: ++c.in_game; break;
      case SessionPhase::BetweenRounds: ++c.between_rounds; break;
      case SessionPhase::Finished: ++c.finished; break;
    }
    c.players += s.players;
    c.observers += s.observers;
    c.connected += s.connected;
  }
  return c;
}

void Registry::shutdown() {
  std::map<std::string, std::shared_ptr<Room>, std::less<>> rooms;
  {
    std::lock_guard lock(mu_);
    rooms.swap(rooms_);
  }
  for (auto& [key, room] : rooms) room->shutdown();
}

}  // namespace taskforge::server
