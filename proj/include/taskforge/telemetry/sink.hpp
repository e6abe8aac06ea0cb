#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "taskforge/telemetry/log_record.hpp"

namespace taskforge::telemetry {

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{200};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{5000};
};

struct SinkConfig {
  std::string endpoint;  // "http://host:port[/prefix]"; empty keeps the log local only
  std::size_t batch_size = 50;
  double flush_interval_seconds = 5.0;
  RetryPolicy retry;
  std::chrono::milliseconds request_timeout{2000};
};

/// "{room_key}_{YYYYMMDDTHHMMSSZ}.log"
std::string session_log_name(std::string_view room_key, std::int64_t session_start_ms);

struct SinkStats {
  std::size_t records = 0;
  std::size_t batches_delivered = 0;
  std::size_t batches_dead_lettered = 0;
  std::size_t post_attempts = 0;
};

/// One session's log: every record goes to the local file first, then in order to the REST endpoint
/// in batches. A batch that still fails after the retry policy is appended to the dead-letter file.
class SessionSink {
 public:
  SessionSink(SinkConfig config, std::string session_key, std::filesystem::path local_file,
              std::filesystem::path dead_letter_file);
  ~SessionSink();

  SessionSink(const SessionSink&) = delete;
  SessionSink& operator=(const SessionSink&) = delete;

  void record(const LogRecord& r);
  void record(const std::vector<LogRecord>& rs);
  /// Hands the partial batch to the deliverer without waiting for it.
  void flush();
  /// Flushes and waits until every batch is delivered or dead-lettered. Idempotent.
  void close();

  SinkStats stats() const;
  const std::filesystem::path& local_file() const { return local_path_; }
  const std::filesystem::path& dead_letter_file() const { return dead_path_; }

 private:
  using Clock = std::chrono::steady_clock;

  void cut_batch_locked();
  void deliver_loop();
  bool post(const std::string& body);
  void dead_letter(const std::vector<std::string>& lines);

  SinkConfig config_;
  std::string session_key_;
  std::filesystem::path local_path_;
  std::filesystem::path dead_path_;
  std::ofstream local_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::vector<std::string> pending_;
  Clock::time_point pending_since_;
  std::deque<std::vector<std::string>> queue_;
  bool in_flight_ = false;
  bool stopping_ = false;
  bool closed_ = false;
  SinkStats stats_;
  std::thread worker_;
};

}  // namespace taskforge::telemetry
