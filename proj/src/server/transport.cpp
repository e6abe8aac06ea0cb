#include "taskforge/server/transport.hpp"

#include <deque>
#include <fstream>
#include <sstream>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace taskforge::server {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

HttpReply json_reply(int status, const json& j) { return {status, "application/json", j.dump()}; }

HttpReply error_reply(int status, std::string message, json issues = nullptr) {
  json j{{"error", std::move(message)}};
  if (!issues.is_null()) j["issues"] = std::move(issues);
  return json_reply(status, j);
}

std::string_view content_type_for(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html") return "text/html";
  if (ext == ".js") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".png") return "image/png";
  if (ext == ".svg") return "image/svg+xml";
  return "application/octet-stream";
}

HttpReply create_room(std::string_view body, Registry& registry, const ServerOptions& options) {
  json req = body.empty() ? json::object() : json::parse(body, nullptr, false);
  if (req.is_discarded() || !req.is_object()) return error_reply(400, "body must be a JSON object");
  const auto host = req.value("host", std::string());
  auto role = parse_role(req.value("role", std::string("PLAYER")));
  if (!role) return error_reply(400, "role must be PLAYER or OBSERVER");

  SessionConfig cfg;
  if (req.contains("preset")) {
    if (!req["preset"].is_string()) return error_reply(400, "preset must be a string");
    try {
      cfg = builtin_preset(req["preset"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      return error_reply(400, e.what());
    }
  } else if (req.contains("config")) {
    const auto text = req["config"].is_string() ? req["config"].get<std::string>() : req["config"].dump();
    auto parsed = parse_config(text);
    if (!parsed) {
      json issues = json::array();
      for (const auto& i : parsed.error()) issues.push_back(i.to_string());
      return error_reply(400, "invalid config", std::move(issues));
    }
    cfg = std::move(*parsed);
  } else if (options.default_config) {
    cfg = *options.default_config;
  } else {
    return error_reply(400, "config or preset required");
  }

  auto created = registry.create_room(host, std::move(cfg), *role);
  if (!created) return error_reply(400, "room not created", created.error());
  json out{{"room", created->key}, {"token", created->token}, {"team_name", created->team_name}};
  if (created->slot) {
    out["slot"] = *created->slot;
    out["color"] = created->color;
  }
  return json_reply(201, out);
}

HttpReply static_file(std::string_view target, const ServerOptions& options) {
  if (options.static_dir.empty()) return error_reply(404, "not found");
  std::string path(target.substr(0, target.find('?')));
  if (path.find("..") != std::string::npos) return error_reply(400, "bad path");
  if (path == "/") path = "/index.html";
  const auto file = options.static_dir / path.substr(1);
  std::ifstream in(file, std::ios::binary);
  if (!in) return error_reply(404, "not found");
  std::ostringstream ss;
  ss << in.rdbuf();
  return {200, std::string(content_type_for(file)), ss.str()};
}

// ---- WebSocket session ----------------------------------------------------------

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, Registry& registry) : ws_(std::move(socket)), registry_(registry) {}

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.text(true);
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (!ec) self->read();
    });
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec) {
    if (ec) return on_close();
    const auto text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    std::size_t start = 0;
    while (start <= text.size()) {
      auto end = text.find('\n', start);
      if (end == std::string::npos) end = text.size();
      const auto line = std::string_view(text).substr(start, end - start);
      if (!line.empty() && line != "\r") on_line(line);
      start = end + 1;
    }
    read();
  }

  void on_close() {
    closed_ = true;
    if (room_) room_->disconnect(binding_);
  }

  void local_error(std::int64_t ack, std::string_view code, std::string_view message) {
    Envelope e;
    e.type = kError;
    e.payload = {{"ack", ack}, {"code", code}, {"message", message}};
    send(encode(e));
  }

  SendFn sender() {
    return [weak = weak_from_this()](std::string line) {
      if (auto self = weak.lock()) self->send(std::move(line));
    };
  }

  void on_line(std::string_view line) {
    auto env = decode(line);
    if (room_) {
      if (!env) return room_->malformed(binding_, env.error());
      return room_->submit(binding_, std::move(*env));
    }
    if (!env) return local_error(0, "bad_message", env.error());
    if (env->type != kJoin) return local_error(env->seq, "not_joined", "send JOIN first");
    auto room = registry_.find(env->room);
    if (!room) return local_error(env->seq, error_code(JoinError::UnknownRoom), error_message(JoinError::UnknownRoom));
    room_ = room;
    const auto seq = env->seq;
    JoinDone done = [weak = weak_from_this(), seq](const Expected<JoinResult, JoinError>& r) {
      if (r) return;
      auto self = weak.lock();
      if (!self) return;
      const auto err = r.error();
      asio::post(self->ws_.get_executor(), [self, err, seq] {
        self->room_.reset();
        self->local_error(seq, error_code(err), error_message(err));
      });
    };
    const auto& p = env->payload;
    if (p.contains("token") && p["token"].is_string()) {
      room->rejoin(p["token"].get<std::string>(), sender(), binding_, std::move(done));
    } else {
      auto role = parse_role(p.value("role", std::string("PLAYER")));
      if (!role) {
        room_.reset();
        return local_error(seq, "invalid_payload", "role must be PLAYER or OBSERVER");
      }
      const auto name = p.contains("name") && p["name"].is_string() ? p["name"].get<std::string>() : std::string();
      room->join(name, *role, sender(), binding_, std::move(done));
    }
  }

  void send(std::string line) {
    asio::post(ws_.get_executor(), [self = shared_from_this(), line = std::move(line)]() mutable {
      if (self->closed_) return;
      self->queue_.push_back(std::move(line));
      if (self->queue_.size() == 1) self->write();
    });
  }

  void write() {
    ws_.async_write(asio::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->queue_.clear();
        return;
      }
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->write();
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  Registry& registry_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  std::shared_ptr<Room> room_;
  std::shared_ptr<Binding> binding_ = std::make_shared<Binding>();
  bool closed_ = false;
};

// ---- HTTP session ----------------------------------------------------------------

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, Registry& registry, std::shared_ptr<const ServerOptions> options)
      : stream_(std::move(socket)), registry_(registry), options_(std::move(options)) {}

  void run() { read(); }

 private:
  void read() {
    parser_.emplace();
    parser_->body_limit(1 << 20);
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, *parser_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec) {
    if (ec) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    auto req = parser_->release();
    if (websocket::is_upgrade(req)) {
      if (req.target() != "/ws") return;
      stream_.expires_never();
      std::make_shared<WsSession>(stream_.release_socket(), registry_)->run(std::move(req));
      return;
    }
    const auto reply = handle_http(std::string_view(req.method_string().data(), req.method_string().size()),
                                   std::string_view(req.target().data(), req.target().size()), req.body(),
                                   registry_, *options_);
    res_ = std::make_shared<http::response<http::string_body>>(static_cast<http::status>(reply.status),
                                                                req.version());
    res_->set(http::field::content_type, reply.content_type);
    res_->keep_alive(req.keep_alive());
    res_->body() = reply.body;
    res_->prepare_payload();
    http::async_write(stream_, *res_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (!self->res_->keep_alive()) {
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
        return;
      }
      self->read();
    });
  }

  beast::tcp_stream stream_;
  Registry& registry_;
  std::shared_ptr<const ServerOptions> options_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
  std::shared_ptr<http::response<http::string_body>> res_;
};

}  // namespace

HttpReply handle_http(std::string_view method, std::string_view target, std::string_view body, Registry& registry,
                      const ServerOptions& options) {
  const auto path = target.substr(0, target.find('?'));
  if (path == "/healthz") {
    if (method != "GET") return error_reply(405, "method not allowed");
    const auto c = registry.counts();
    return json_reply(200, {{"status", "ok"},
                            {"rooms", c.rooms},
                            {"lobby", c.lobby},
                            {"in_game", c.in_game},
                            {"between_rounds", c.between_rounds},
                            {"finished", c.finished},
                            {"players", c.players},
                            {"observers", c.observers},
                            {"connected", c.connected}});
  }
  if (path == "/rooms") {
    if (method != "POST") return error_reply(405, "method not allowed");
    return create_room(body, registry, options);
  }
  if (method == "GET") return static_file(target, options);
  return error_reply(404, "not found");
}

struct Server::Impl : std::enable_shared_from_this<Server::Impl> {
  Impl(asio::io_context& io, Registry& registry, ServerOptions options)
      : io(io),
        registry(registry),
        options(std::make_shared<const ServerOptions>(std::move(options))),
        acceptor(asio::make_strand(io)) {}

  void accept() {
    acceptor.async_accept(asio::make_strand(io), [self = shared_from_this()](beast::error_code ec, tcp::socket s) {
      if (ec) return;  // acceptor closed
      std::make_shared<HttpSession>(std::move(s), self->registry, self->options)->run();
      self->accept();
    });
  }

  asio::io_context& io;
  Registry& registry;
  std::shared_ptr<const ServerOptions> options;
  tcp::acceptor acceptor;
};

Server::Server(asio::io_context& io, Registry& registry, ServerOptions options)
    : impl_(std::make_shared<Impl>(io, registry, std::move(options))) {}

Server::~Server() { stop(); }

void Server::start() {
  auto& a = impl_->acceptor;
  const tcp::endpoint ep(asio::ip::make_address(impl_->options->address), impl_->options->port);
  a.open(ep.protocol());
  a.set_option(asio::socket_base::reuse_address(true));
  a.bind(ep);
  a.listen(asio::socket_base::max_listen_connections);
  impl_->accept();
}

void Server::stop() {
  if (!impl_) return;
  asio::post(impl_->acceptor.get_executor(), [impl = impl_] {
    beast::error_code ec;
    impl->acceptor.close(ec);
  });
}

unsigned short Server::port() const { return impl_->acceptor.local_endpoint().port(); }

}  // namespace taskforge::server
