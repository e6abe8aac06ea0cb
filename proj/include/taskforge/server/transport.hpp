#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <boost/asio/io_context.hpp>

#include "taskforge/server/registry.hpp"

namespace taskforge::server {

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 0;  // 0 picks a free port
  std::filesystem::path static_dir;
  std::optional<SessionConfig> default_config;  // for POST /rooms bodies without config or preset
};

struct HttpReply {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Plain HTTP routes: GET /healthz, POST /rooms, static files.
HttpReply handle_http(std::string_view method, std::string_view target, std::string_view body, Registry& registry,
                      const ServerOptions& options);

/// HTTP and WebSocket (/ws) on one port. Messages are newline-delimited JSON envelopes.
class Server {
 public:
  Server(asio::io_context& io, Registry& registry, ServerOptions options);
  ~Server();

  /// Binds and starts accepting. Throws boost::system::system_error on bind failure.
  void start();
  void stop();
  unsigned short port() const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace taskforge::server
