#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "taskforge/server/wire.hpp"

namespace taskforge::server {

/// WebSocket client for bots and tests. Runs its own I/O thread; received envelopes queue up
/// and are also kept in history().
class WsClient {
 public:
  WsClient();
  ~WsClient();

  WsClient(const WsClient&) = delete;
  WsClient& operator=(const WsClient&) = delete;

  /// Throws boost::system::system_error when the connection or handshake fails.
  void connect(const std::string& host, unsigned short port, const std::string& target = "/ws");
  void close();
  bool closed() const;

  /// Sends {seq, type, room, payload} with the next client sequence number and returns it.
  std::int64_t send(std::string_view type, json payload, std::string room = "");
  void send_raw(std::string text);

  std::optional<Envelope> next(std::chrono::milliseconds timeout);
  /// Next envelope of `type` matching `pred`; envelopes skipped on the way are dropped from the queue.
  std::optional<Envelope> wait_for(std::string_view type, std::chrono::milliseconds timeout,
                                   const std::function<bool(const Envelope&)>& pred = {});
  /// The answer to client message `seq`: an envelope whose payload.ack equals seq.
  std::optional<Envelope> wait_ack(std::int64_t seq, std::chrono::milliseconds timeout);

  std::vector<Envelope> history() const;
  std::vector<std::string> bad_lines() const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

struct CreatedRoomReply {
  std::string key;
  std::string token;
  std::optional<int> slot;
  std::string team_name;
};

/// POST /rooms with `body` ({host, role, preset | config}).
Expected<CreatedRoomReply, std::string> http_create_room(const std::string& host, unsigned short port,
                                                         const json& body);
Expected<json, std::string> http_get_json(const std::string& host, unsigned short port, const std::string& path);

}  // namespace taskforge::server
