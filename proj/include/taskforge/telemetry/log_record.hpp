#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "taskforge/sim/types.hpp"

namespace taskforge::telemetry {

enum class RecordKind : std::uint8_t { Chat, Action, System };
enum class ActionKind : std::uint8_t { Buy, Sell, Upgrade };

std::string_view to_string(ActionKind a);
std::optional<ActionKind> parse_action(std::string_view s);

inline constexpr std::size_t kChatCap = 500;  // code points

struct LogRecord {
  RecordKind kind = RecordKind::Chat;
  std::optional<std::int64_t> timestamp_ms;  // UTC, unix epoch; absent in published snippets
  std::string user;                          // CHAT speaker or ACTION user; unused by SYSTEM

  // CHAT
  std::string text;

  // ACTION
  ActionKind action = ActionKind::Buy;
  std::string tower_type;
  Cell location;
  std::string track;  // UPGRADE only
  int level = 0;      // UPGRADE only

  // SYSTEM
  std::string event;
  std::vector<std::pair<std::string, std::string>> attributes;

  const std::string* attribute(std::string_view key) const;

  bool operator==(const LogRecord&) const = default;
};

LogRecord chat(std::optional<std::int64_t> ts, std::string user, std::string text);
LogRecord action(std::optional<std::int64_t> ts, ActionKind a, std::string tower_type, Cell location,
                 std::string user);
LogRecord upgrade(std::optional<std::int64_t> ts, std::string tower_type, std::string track, int level,
                  Cell location, std::string user);
LogRecord system(std::optional<std::int64_t> ts, std::string event,
                 std::vector<std::pair<std::string, std::string>> attributes = {});

/// Applies the chat rules: newlines become single spaces, text capped at kChatCap code points.
/// A capped message is followed by a SYSTEM CHAT_TRUNCATED record.
std::vector<LogRecord> chat_records(std::optional<std::int64_t> ts, std::string user, std::string text);

/// "2024-05-01T12:00:00.123Z"
std::string format_timestamp(std::int64_t ms);
std::optional<std::int64_t> parse_timestamp(std::string_view s);

std::string escape_xml(std::string_view s);
std::string unescape_xml(std::string_view s);

/// One line, no trailing newline.
std::string serialize_record(const LogRecord& r);

struct LineIssue {
  int line = 0;  // 1-based
  std::string message;
};

struct ParsedLog {
  std::vector<LogRecord> records;
  std::vector<int> lines;  // source line of each record
  std::vector<LineIssue> issues;
};

/// Unrecognized or malformed lines are reported and skipped; blank lines are ignored.
ParsedLog parse_log(std::string_view text);

/// Parses one line; on failure returns nullopt and sets `error`.
std::optional<LogRecord> parse_record(std::string_view line, std::string* error = nullptr);

}  // namespace taskforge::telemetry
