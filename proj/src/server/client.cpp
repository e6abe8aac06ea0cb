#include "taskforge/server/client.hpp"

#include <boost/asio/connect.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <httplib.h>

namespace taskforge::server {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

struct WsClient::Impl : std::enable_shared_from_this<WsClient::Impl> {
  asio::io_context io;
  websocket::stream<tcp::socket> ws{io};
  beast::flat_buffer buffer;
  std::deque<std::string> outbox;
  std::thread thread;
  std::int64_t next_seq = 1;

  mutable std::mutex mu;
  std::condition_variable cv;
  std::deque<Envelope> inbox;
  std::vector<Envelope> history;
  std::vector<std::string> bad;
  bool closed = false;

  void read() {
    ws.async_read(buffer, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        std::lock_guard lock(self->mu);
        self->closed = true;
        self->cv.notify_all();
        return;
      }
      const auto text = beast::buffers_to_string(self->buffer.data());
      self->buffer.consume(self->buffer.size());
      {
        std::lock_guard lock(self->mu);
        std::size_t start = 0;
        while (start <= text.size()) {
          auto end = text.find('\n', start);
          if (end == std::string::npos) end = text.size();
          const auto line = text.substr(start, end - start);
          start = end + 1;
          if (line.empty()) continue;
          if (auto e = decode(line)) {
            self->history.push_back(*e);
            self->inbox.push_back(std::move(*e));
          } else {
            self->bad.push_back(line);
          }
        }
        self->cv.notify_all();
      }
      self->read();
    });
  }

  void write() {
    ws.async_write(asio::buffer(outbox.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->outbox.clear();
        return;
      }
      self->outbox.pop_front();
      if (!self->outbox.empty()) self->write();
    });
  }
};

WsClient::WsClient() : impl_(std::make_shared<Impl>()) {}

WsClient::~WsClient() { close(); }

void WsClient::connect(const std::string& host, unsigned short port, const std::string& target) {
  tcp::resolver resolver(impl_->io);
  auto results = resolver.resolve(host, std::to_string(port));
  asio::connect(impl_->ws.next_layer(), results);
  impl_->ws.handshake(host + ":" + std::to_string(port), target);
  impl_->ws.text(true);
  impl_->read();
  impl_->thread = std::thread([impl = impl_] { impl->io.run(); });
}

void WsClient::close() {
  if (!impl_->thread.joinable()) return;
  asio::post(impl_->io, [impl = impl_] {
    impl->ws.async_close(websocket::close_code::normal, [impl](beast::error_code) {
      beast::error_code ec;
      impl->ws.next_layer().close(ec);
    });
  });
  // The read loop ends once the close handshake completes or the socket drops.
  {
    std::unique_lock lock(impl_->mu);
    impl_->cv.wait_for(lock, std::chrono::seconds(2), [&] { return impl_->closed; });
  }
  impl_->io.stop();
  impl_->thread.join();
  std::lock_guard lock(impl_->mu);
  impl_->closed = true;
}

bool WsClient::closed() const {
  std::lock_guard lock(impl_->mu);
  return impl_->closed;
}

std::int64_t WsClient::send(std::string_view type, json payload, std::string room) {
  Envelope e;
  e.type = type;
  e.room = std::move(room);
  e.payload = std::move(payload);
  std::int64_t seq = 0;
  {
    std::lock_guard lock(impl_->mu);
    seq = e.seq = impl_->next_seq++;
  }
  send_raw(encode(e));
  return seq;
}

void WsClient::send_raw(std::string text) {
  asio::post(impl_->io, [impl = impl_, text = std::move(text)]() mutable {
    impl->outbox.push_back(std::move(text));
    if (impl->outbox.size() == 1) impl->write();
  });
}

std::optional<Envelope> WsClient::next(std::chrono::milliseconds timeout) {
  std::unique_lock lock(impl_->mu);
  if (!impl_->cv.wait_for(lock, timeout, [&] { return !impl_->inbox.empty() || impl_->closed; })) return std::nullopt;
  if (impl_->inbox.empty()) return std::nullopt;
  auto e = std::move(impl_->inbox.front());
  impl_->inbox.pop_front();
  return e;
}

std::optional<Envelope> WsClient::wait_for(std::string_view type, std::chrono::milliseconds timeout,
                                           const std::function<bool(const Envelope&)>& pred) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) return std::nullopt;
    auto e = next(left);
    if (!e) return std::nullopt;
    if (e->type == type && (!pred || pred(*e))) return e;
  }
}

std::optional<Envelope> WsClient::wait_ack(std::int64_t seq, std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) return std::nullopt;
    auto e = next(left);
    if (!e) return std::nullopt;
    if (e->payload.contains("ack") && e->payload["ack"] == seq) return e;
  }
}

std::vector<Envelope> WsClient::history() const {
  std::lock_guard lock(impl_->mu);
  return impl_->history;
}

std::vector<std::string> WsClient::bad_lines() const {
  std::lock_guard lock(impl_->mu);
  return impl_->bad;
}

Expected<CreatedRoomReply, std::string> http_create_room(const std::string& host, unsigned short port,
                                                         const json& body) {
  httplib::Client cli(host, port);
  auto res = cli.Post("/rooms", body.dump(), "application/json");
  if (!res) return unexpected("POST /rooms failed: " + httplib::to_string(res.error()));
  auto j = json::parse(res->body, nullptr, false);
  if (res->status != 201) {
    return unexpected("POST /rooms: " + std::to_string(res->status) + " " + res->body);
  }
  if (j.is_discarded()) return unexpected(std::string("POST /rooms: reply is not JSON"));
  CreatedRoomReply out;
  out.key = j.value("room", std::string());
  out.token = j.value("token", std::string());
  if (j.contains("slot")) out.slot = j["slot"].get<int>();
  out.team_name = j.value("team_name", std::string());
  return out;
}

Expected<json, std::string> http_get_json(const std::string& host, unsigned short port, const std::string& path) {
  httplib::Client cli(host, port);
  auto res = cli.Get(path);
  if (!res) return unexpected("GET " + path + " failed: " + httplib::to_string(res.error()));
  auto j = json::parse(res->body, nullptr, false);
  if (j.is_discarded()) return unexpected("GET " + path + ": reply is not JSON");
  return j;
}

}  // namespace taskforge::server
