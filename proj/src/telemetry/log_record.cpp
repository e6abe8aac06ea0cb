#include "taskforge/telemetry/log_record.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

namespace taskforge::telemetry {

namespace {

constexpr std::pair<ActionKind, std::string_view> kActions[] = {
    {ActionKind::Buy, "BUY"}, {ActionKind::Sell, "SELL"}, {ActionKind::Upgrade, "UPGRADE"}};

std::string single_line(std::string s) {
  for (auto& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

std::string tag(std::string_view name, std::string_view content) {
  std::string out;
  out.reserve(name.size() * 2 + content.size() + 5);
  out += '<';
  out += name;
  out += '>';
  out += content;
  out += "</";
  out += name;
  out += '>';
  return out;
}

struct Element {
  std::string name;
  std::string content;  // still escaped
};

// Splits a line into <name>content</name> elements separated by whitespace.
bool split_elements(std::string_view line, std::vector<Element>& out, std::string& error) {
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
  };
  skip_ws();
  while (i < line.size()) {
    if (line[i] != '<') {
      error = "expected '<' at column " + std::to_string(i + 1);
      return false;
    }
    const auto close = line.find('>', i + 1);
    if (close == std::string_view::npos) {
      error = "unterminated tag at column " + std::to_string(i + 1);
      return false;
    }
    const auto name = line.substr(i + 1, close - i - 1);
    if (name.empty() || name.find_first_of("</ ") != std::string_view::npos) {
      error = "malformed tag at column " + std::to_string(i + 1);
      return false;
    }
    const std::string end = "</" + std::string(name) + ">";
    const auto end_at = line.find(end, close + 1);
    if (end_at == std::string_view::npos) {
      error = "missing " + end;
      return false;
    }
    out.push_back({std::string(name), std::string(line.substr(close + 1, end_at - close - 1))});
    i = end_at + end.size();
    skip_ws();
  }
  return true;
}

std::optional<Cell> parse_location(std::string_view s) {
  int x = 0;
  int y = 0;
  char open = 0;
  char comma = 0;
  char shut = 0;
  int consumed = 0;
  const std::string copy(s);
  if (std::sscanf(copy.c_str(), " %c %d %c %d %c%n", &open, &x, &comma, &y, &shut, &consumed) != 5) return std::nullopt;
  if (open != '(' || comma != ',' || shut != ')' || static_cast<std::size_t>(consumed) != copy.size()) {
    return std::nullopt;
  }
  return Cell{x, y};
}

std::optional<int> parse_int(std::string_view s) {
  if (s.empty() || s.size() > 9) return std::nullopt;
  int v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v;
}

// Byte length of the first `n` UTF-8 code points of s.
std::size_t utf8_prefix(std::string_view s, std::size_t n) {
  std::size_t i = 0;
  while (i < s.size() && n > 0) {
    ++i;
    while (i < s.size() && (static_cast<unsigned char>(s[i]) & 0xC0) == 0x80) ++i;
    --n;
  }
  return i;
}

}  // namespace

std::string_view to_string(ActionKind a) {
  for (const auto& [k, name] : kActions) {
    if (k == a) return name;
  }
  return "?";
}

std::optional<ActionKind> parse_action(std::string_view s) {
  for (const auto& [k, name] : kActions) {
    if (name == s) return k;
  }
  return std::nullopt;
}

const std::string* LogRecord::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return &v;
  }
  return nullptr;
}

LogRecord chat(std::optional<std::int64_t> ts, std::string user, std::string text) {
  LogRecord r;
  r.kind = RecordKind::Chat;
  r.timestamp_ms = ts;
  r.user = std::move(user);
  r.text = std::move(text);
  return r;
}

LogRecord action(std::optional<std::int64_t> ts, ActionKind a, std::string tower_type, Cell location,
                 std::string user) {
  LogRecord r;
  r.kind = RecordKind::Action;
  r.timestamp_ms = ts;
  r.action = a;
  r.tower_type = std::move(tower_type);
  r.location = location;
  r.user = std::move(user);
  return r;
}

LogRecord upgrade(std::optional<std::int64_t> ts, std::string tower_type, std::string track, int level,
                  Cell location, std::string user) {
  LogRecord r = action(ts, ActionKind::Upgrade, std::move(tower_type), location, std::move(user));
  r.track = std::move(track);
  r.level = level;
  return r;
}

LogRecord system(std::optional<std::int64_t> ts, std::string event,
                 std::vector<std::pair<std::string, std::string>> attributes) {
  LogRecord r;
  r.kind = RecordKind::System;
  r.timestamp_ms = ts;
  r.event = std::move(event);
  r.attributes = std::move(attributes);
  return r;
}

std::vector<LogRecord> chat_records(std::optional<std::int64_t> ts, std::string user, std::string text) {
  text = single_line(std::move(text));
  const auto cut = utf8_prefix(text, kChatCap);
  std::vector<LogRecord> out;
  if (cut < text.size()) {
    const auto original = text.size();
    text.resize(cut);
    out.push_back(chat(ts, user, std::move(text)));
    out.push_back(system(ts, "CHAT_TRUNCATED", {{"user", std::move(user)}, {"bytes", std::to_string(original)}}));
  } else {
    out.push_back(chat(ts, std::move(user), std::move(text)));
  }
  return out;
}

std::string format_timestamp(std::int64_t ms) {
  using namespace std::chrono;
  const sys_time<milliseconds> tp{milliseconds{ms}};
  const auto day = floor<days>(tp);
  const year_month_day ymd{day};
  const hh_mm_ss hms{tp - day};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()), static_cast<int>(hms.subseconds().count()));
  return buf;
}

std::optional<std::int64_t> parse_timestamp(std::string_view s) {
  int y = 0;
  unsigned mo = 0;
  unsigned d = 0;
  int h = 0;
  int mi = 0;
  int sec = 0;
  int milli = 0;
  int consumed = 0;
  const std::string copy(s);
  if (std::sscanf(copy.c_str(), "%4d-%2u-%2uT%2d:%2d:%2d.%3dZ%n", &y, &mo, &d, &h, &mi, &sec, &milli, &consumed) != 7 ||
      static_cast<std::size_t>(consumed) != copy.size() || copy.size() != 24) {
    return std::nullopt;
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 59) return std::nullopt;
  const auto tp = sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec} + milliseconds{milli};
  return tp.time_since_epoch().count();
}

std::string escape_xml(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_xml(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '&') {
      const auto rest = s.substr(i);
      if (rest.starts_with("&amp;")) {
        out += '&';
        i += 4;
        continue;
      }
      if (rest.starts_with("&lt;")) {
        out += '<';
        i += 3;
        continue;
      }
      if (rest.starts_with("&gt;")) {
        out += '>';
        i += 3;
        continue;
      }
    }
    out += s[i];
  }
  return out;
}

std::string serialize_record(const LogRecord& r) {
  std::string out;
  if (r.timestamp_ms) out += tag("ts", format_timestamp(*r.timestamp_ms)) + " ";
  switch (r.kind) {
    case RecordKind::Chat:
      out += tag("speaker", escape_xml(single_line(r.user))) + " " + tag("chat_text", escape_xml(single_line(r.text)));
      break;
    case RecordKind::Action:
      out += tag("action", to_string(r.action)) + " " + tag("tower_type", escape_xml(r.tower_type)) + " ";
      if (r.action == ActionKind::Upgrade) {
        out += tag("upgrade_track", escape_xml(r.track)) + " " + tag("level", std::to_string(r.level)) + " ";
      }
      out += tag("location", "(" + std::to_string(r.location.x) + ", " + std::to_string(r.location.y) + ")") + " " +
             tag("user", escape_xml(single_line(r.user)));
      break;
    case RecordKind::System:
      out += tag("event", escape_xml(r.event));
      for (const auto& [k, v] : r.attributes) out += " " + tag("detail", escape_xml(single_line(k + "=" + v)));
      break;
  }
  return out;
}

std::optional<LogRecord> parse_record(std::string_view line, std::string* error) {
  std::string err;
  auto fail = [&](std::string why) -> std::optional<LogRecord> {
    if (error) *error = std::move(why);
    return std::nullopt;
  };
  std::vector<Element> els;
  if (!split_elements(line, els, err)) return fail(err);
  if (els.empty()) return fail("empty line");

  LogRecord r;
  std::size_t i = 0;
  if (els[0].name == "ts") {
    r.timestamp_ms = parse_timestamp(els[0].content);
    if (!r.timestamp_ms) return fail("bad timestamp \"" + els[0].content + "\"");
    i = 1;
  }
  auto expect = [&](std::string_view name) -> const Element* {
    if (i < els.size() && els[i].name == name) return &els[i++];
    err = "expected <" + std::string(name) + ">";
    return nullptr;
  };
  if (i >= els.size()) return fail("timestamp without a record");
  const auto& head = els[i].name;
  if (head == "speaker") {
    r.kind = RecordKind::Chat;
    r.user = unescape_xml(expect("speaker")->content);
    const auto* text = expect("chat_text");
    if (!text) return fail(err);
    r.text = unescape_xml(text->content);
  } else if (head == "action") {
    r.kind = RecordKind::Action;
    const auto kind = parse_action(expect("action")->content);
    if (!kind) return fail("unknown action \"" + els[i - 1].content + "\"");
    r.action = *kind;
    const auto* type = expect("tower_type");
    if (!type) return fail(err);
    r.tower_type = unescape_xml(type->content);
    if (r.action == ActionKind::Upgrade) {
      const auto* track = expect("upgrade_track");
      if (!track) return fail(err);
      r.track = unescape_xml(track->content);
      const auto* level = expect("level");
      if (!level) return fail(err);
      const auto n = parse_int(level->content);
      if (!n) return fail("bad level \"" + level->content + "\"");
      r.level = *n;
    }
    const auto* loc = expect("location");
    if (!loc) return fail(err);
    const auto cell = parse_location(loc->content);
    if (!cell) return fail("bad location \"" + loc->content + "\"");
    r.location = *cell;
    const auto* user = expect("user");
    if (!user) return fail(err);
    r.user = unescape_xml(user->content);
  } else if (head == "event") {
    r.kind = RecordKind::System;
    r.event = unescape_xml(expect("event")->content);
    while (i < els.size() && els[i].name == "detail") {
      const auto kv = unescape_xml(els[i++].content);
      const auto eq = kv.find('=');
      if (eq == std::string::npos) return fail("detail without '='");
      r.attributes.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    }
  } else {
    return fail("unknown record starting with <" + head + ">");
  }
  if (i != els.size()) return fail("unexpected <" + els[i].name + ">");
  return r;
}

ParsedLog parse_log(std::string_view text) {
  ParsedLog out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    std::string err;
    if (auto r = parse_record(line, &err)) {
      out.records.push_back(std::move(*r));
      out.lines.push_back(line_no);
    } else {
      out.issues.push_back({line_no, err});
    }
  }
  return out;
}

}  // namespace taskforge::telemetry
