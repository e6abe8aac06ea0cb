#include "taskforge/telemetry/sink.hpp"

#include <httplib.h>

#include <algorithm>
#include <cstdio>

namespace taskforge::telemetry {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host:port
  std::string path;    // "/prefix/log"
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme = url.find("://");
  const auto slash = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  Endpoint e;
  e.origin = slash == std::string::npos ? url : url.substr(0, slash);
  std::string prefix = slash == std::string::npos ? "" : url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  e.path = prefix + "/log";
  return e;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

}  // namespace

std::string session_log_name(std::string_view room_key, std::int64_t session_start_ms) {
  auto ts = format_timestamp(session_start_ms);  // 2024-05-01T12:00:00.000Z
  std::string compact;
  for (char c : ts.substr(0, 19)) {
    if (c != '-' && c != ':') compact += c;
  }
  return std::string(room_key) + "_" + compact + "Z.log";
}

SessionSink::SessionSink(SinkConfig config, std::string session_key, std::filesystem::path local_file,
                         std::filesystem::path dead_letter_file)
    : config_(std::move(config)),
      session_key_(std::move(session_key)),
      local_path_(std::move(local_file)),
      dead_path_(std::move(dead_letter_file)) {
  if (config_.batch_size == 0) throw std::invalid_argument("batch size must be at least 1");
  if (local_path_.has_parent_path()) std::filesystem::create_directories(local_path_.parent_path());
  local_.open(local_path_, std::ios::app | std::ios::binary);
  if (!local_) throw std::runtime_error("cannot open " + local_path_.string());
  if (!config_.endpoint.empty()) worker_ = std::thread([this] { deliver_loop(); });
}

SessionSink::~SessionSink() { close(); }

void SessionSink::record(const LogRecord& r) { record(std::vector<LogRecord>{r}); }

void SessionSink::record(const std::vector<LogRecord>& rs) {
  std::lock_guard lock(mu_);
  if (closed_) throw std::logic_error("record after close");
  for (const auto& r : rs) {
    auto line = serialize_record(r);
    local_ << line << '\n';
    ++stats_.records;
    if (config_.endpoint.empty()) continue;
    if (pending_.empty()) pending_since_ = Clock::now();
    pending_.push_back(std::move(line));
    if (pending_.size() >= config_.batch_size) cut_batch_locked();
  }
  // the line is on disk before any POST that carries it can start
  local_.flush();
  cv_.notify_all();
}

void SessionSink::cut_batch_locked() {
  if (pending_.empty()) return;
  queue_.push_back(std::move(pending_));
  pending_.clear();
}

void SessionSink::flush() {
  std::lock_guard lock(mu_);
  cut_batch_locked();
  cv_.notify_all();
}

void SessionSink::close() {
  {
    std::unique_lock lock(mu_);
    if (closed_) return;
    closed_ = true;
    cut_batch_locked();
    stopping_ = true;
    cv_.notify_all();
  }
  if (worker_.joinable()) worker_.join();
  local_.flush();
  local_.close();
}

SinkStats SessionSink::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

void SessionSink::deliver_loop() {
  const auto interval = std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double>(config_.flush_interval_seconds));
  std::unique_lock lock(mu_);
  for (;;) {
    if (queue_.empty() && !pending_.empty() && Clock::now() - pending_since_ >= interval) cut_batch_locked();
    if (queue_.empty()) {
      if (stopping_) return;
      if (pending_.empty()) {
        cv_.wait(lock);
      } else {
        cv_.wait_until(lock, pending_since_ + interval);
      }
      continue;
    }
    auto batch = std::move(queue_.front());
    queue_.pop_front();
    lock.unlock();
    const bool ok = post(join_lines(batch));
    if (!ok) dead_letter(batch);
    lock.lock();
    ++(ok ? stats_.batches_delivered : stats_.batches_dead_lettered);
  }
}

bool SessionSink::post(const std::string& body) {
  const auto ep = split_endpoint(config_.endpoint);
  httplib::Client client(ep.origin);
  const auto secs = config_.request_timeout.count() / 1000;
  const auto usecs = (config_.request_timeout.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  const httplib::Headers headers{{"X-Session", session_key_}};
  auto backoff = config_.retry.initial_backoff;
  for (int attempt = 1; attempt <= std::max(1, config_.retry.max_attempts); ++attempt) {
    {
      std::lock_guard lock(mu_);
      ++stats_.post_attempts;
    }
    auto res = client.Post(ep.path, headers, body, "text/plain; charset=utf-8");
    if (res && res->status >= 200 && res->status < 300) return true;
    if (attempt == config_.retry.max_attempts) break;
    std::this_thread::sleep_for(backoff);
    backoff = std::min(config_.retry.max_backoff,
                       std::chrono::milliseconds(static_cast<long>(backoff.count() * config_.retry.multiplier)));
  }
  return false;
}

void SessionSink::dead_letter(const std::vector<std::string>& lines) {
  std::ofstream out(dead_path_, std::ios::app | std::ios::binary);
  for (const auto& l : lines) out << l << '\n';
  out.flush();
}

}  // namespace taskforge::telemetry
