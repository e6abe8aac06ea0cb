#include "taskforge/analysis/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace taskforge::analysis {

using telemetry::ActionKind;
using telemetry::RecordKind;

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::optional<std::int64_t> to_int(const std::string* s) {
  if (!s || s->empty()) return std::nullopt;
  std::size_t used = 0;
  try {
    const auto v = std::stoll(*s, &used);
    if (used != s->size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string real(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

// ---- board reconstruction ---------------------------------------------------

struct BoardTower {
  const TowerSpec* spec = nullptr;
  std::array<int, 3> levels{0, 0, 0};
  std::int64_t spent = 0;
};

const TowerSpec* find_spec(const SessionConfig& cfg, std::string_view type) {
  const auto want = upper(type);
  for (const auto& t : cfg.tower_catalog) {
    if (upper(t.id) == want) return &t;
  }
  return nullptr;
}

std::optional<int> track_index(std::string_view track) {
  const auto t = upper(track);
  if (t == "RANGE") return 0;
  if (t == "DAMAGE") return 1;
  if (t == "FIRERATE") return 2;
  return std::nullopt;
}

struct RoundBuilder {
  const SessionConfig& cfg;
  RoundSummary sum;
  std::map<Cell, BoardTower> board;
  bool attack = false;
  std::int64_t starting_health = 0;

  RoundBuilder(const SessionConfig& c, std::string room) : cfg(c) { sum.room = std::move(room); }

  void start(const LogRecord& r) {
    sum.level = static_cast<int>(to_int(r.attribute("level")).value_or(0));
    sum.round = static_cast<int>(to_int(r.attribute("round")).value_or(0));
    const auto li = sum.level - 1;
    if (li < 0 || li >= static_cast<int>(cfg.levels.size())) {
      sum.notes.push_back("level " + std::to_string(sum.level) + " not in config");
      return;
    }
    const auto& level = cfg.levels[static_cast<std::size_t>(li)];
    const std::int64_t pools = cfg.money_model == MoneyModel::Individual ? static_cast<std::int64_t>(cfg.team.size()) : 1;
    sum.starting_gold = level.starting_gold * pools;
    starting_health = level.starting_health;
    for (const auto& p : level.preplaced) {
      if (const auto* spec = find_spec(cfg, p.spec_id)) board[p.cell] = BoardTower{spec, {0, 0, 0}, 0};
    }
  }

  double discount_at(Cell c) const {
    double best = 1.0;
    for (const auto& [cell, t] : board) {
      if (cell == c || t.spec->archetype != Archetype::Discount) continue;
      const double reach = t.spec->range * std::pow(1.25, t.levels[0]);
      const double dx = cell.x - c.x;
      const double dy = cell.y - c.y;
      if (std::sqrt(dx * dx + dy * dy) <= reach + 1e-9) best = std::min(best, t.spec->effects.discount_multiplier);
    }
    return best;
  }

  void action(const LogRecord& r) {
    switch (r.action) {
      case ActionKind::Buy: {
        ++sum.buys;
        const auto* spec = find_spec(cfg, r.tower_type);
        if (!spec) {
          sum.notes.push_back("unknown tower " + r.tower_type);
          return;
        }
        board[r.location] = BoardTower{spec, {0, 0, 0}, spec->cost};
        sum.spent += spec->cost;
        break;
      }
      case ActionKind::Upgrade: {
        ++sum.upgrades;
        auto it = board.find(r.location);
        const auto track = track_index(r.track);
        if (it == board.end() || !track || r.level < 1) {
          sum.notes.push_back("upgrade without a tower at (" + std::to_string(r.location.x) + ", " +
                              std::to_string(r.location.y) + ")");
          return;
        }
        const std::int64_t base = it->second.spec->upgrade_cost * (std::int64_t{1} << (r.level - 1));
        const double m = discount_at(r.location);
        const std::int64_t cost = m >= 1.0 ? base : std::llround(static_cast<double>(base) * m);
        it->second.levels[static_cast<std::size_t>(*track)] = r.level;
        it->second.spent += cost;
        sum.spent += cost;
        break;
      }
      case ActionKind::Sell: {
        ++sum.sells;
        auto it = board.find(r.location);
        if (it == board.end()) {
          sum.notes.push_back("sell without a tower at (" + std::to_string(r.location.x) + ", " +
                              std::to_string(r.location.y) + ")");
          return;
        }
        const double rate = attack ? cfg.refund.attack : cfg.refund.planning;
        const auto refund = static_cast<std::int64_t>(std::floor(rate * static_cast<double>(it->second.spent) + 1e-9));
        sum.refunds += refund;
        board.erase(it);
        break;
      }
    }
  }

  void system(const LogRecord& r) {
    if (r.event == "PHASE") {
      const auto* phase = r.attribute("phase");
      attack = phase && *phase == "ATTACK";
    } else if (r.event == "KILL") {
      ++sum.kills;
      const auto* id = r.attribute("enemy");
      const auto* v = id ? cfg.find_enemy(*id) : nullptr;
      if (!v) {
        sum.notes.push_back("unknown enemy in kill record");
        return;
      }
      sum.bounties += v->bounty;
      sum.points += v->points;
    } else if (r.event == "LEAK") {
      ++sum.leaks;
    } else if (r.event == "ROUND_END") {
      if (const auto* o = r.attribute("outcome")) sum.outcome = *o;
    }
  }

  RoundSummary finish(const LogRecord* result) {
    sum.unspent = sum.starting_gold - sum.spent + sum.refunds + sum.bounties;
    sum.final_health = starting_health - sum.leaks;
    if (cfg.score.mode == ScoreMode::Binary) {
      sum.score = sum.outcome == "WIN" ? 1.0 : 0.0;
    } else {
      sum.score = cfg.score.w_unspent * static_cast<double>(sum.unspent) +
                  cfg.score.w_points * static_cast<double>(sum.points) +
                  cfg.score.w_health * static_cast<double>(sum.final_health);
    }
    if (result) {
      if (const auto* o = result->attribute("outcome")) sum.outcome = *o;
      sum.reported_unspent = to_int(result->attribute("unspent"));
      if (sum.reported_unspent && *sum.reported_unspent != sum.unspent) {
        sum.mismatch = true;
        sum.notes.push_back("unspent " + std::to_string(sum.unspent) + " but round result reports " +
                            std::to_string(*sum.reported_unspent));
      }
      if (const auto reported_health = to_int(result->attribute("health")); reported_health && *reported_health != sum.final_health) {
        sum.mismatch = true;
        sum.notes.push_back("health " + std::to_string(sum.final_health) + " but round result reports " +
                            std::to_string(*reported_health));
      }
    }
    return std::move(sum);
  }
};

}  // namespace

long Heatmap::total() const {
  long t = 0;
  for (auto c : counts) t += c;
  return t;
}

HeatmapResult placement_heatmap(const std::vector<LogRecord>& records, int width, int height) {
  HeatmapResult out;
  out.heatmap.width = std::max(0, width);
  out.heatmap.height = std::max(0, height);
  out.heatmap.counts.assign(static_cast<std::size_t>(out.heatmap.width * out.heatmap.height), 0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.kind != RecordKind::Action || r.action != ActionKind::Buy) continue;
    const auto c = r.location;
    if (c.x < 0 || c.y < 0 || c.x >= out.heatmap.width || c.y >= out.heatmap.height) {
      out.excluded.push_back("record " + std::to_string(i) + ": BUY " + r.tower_type + " at (" + std::to_string(c.x) +
                             ", " + std::to_string(c.y) + ") outside " + std::to_string(width) + "x" +
                             std::to_string(height));
      continue;
    }
    ++out.heatmap.counts[static_cast<std::size_t>(c.y * out.heatmap.width + c.x)];
    ++out.buys;
  }
  return out;
}

std::vector<RoundSummary> expenditure_series(const std::vector<LogRecord>& records, const SessionConfig& config,
                                             std::string room) {
  std::vector<RoundSummary> out;
  std::optional<RoundBuilder> current;
  bool started = false;
  auto close = [&](const LogRecord* result) {
    if (!current) return;
    auto s = current->finish(result);
    s.complete = started && result != nullptr;
    if (!started) s.notes.push_back("records before the first round start");
    if (started && !result) s.notes.push_back("round has no result record");
    out.push_back(std::move(s));
    current.reset();
  };
  for (const auto& r : records) {
    if (r.kind == RecordKind::System && r.event == "ROUND_START") {
      close(nullptr);
      current.emplace(config, room);
      started = true;
      current->start(r);
      continue;
    }
    if (r.kind == RecordKind::System && r.event == "ROUND_RESULT") {
      if (!current) {
        started = false;
        current.emplace(config, room);
      }
      close(&r);
      continue;
    }
    if (!current) {
      // partial round: nothing to anchor it to
      if (r.kind == RecordKind::Chat) continue;
      started = false;
      current.emplace(config, room);
    }
    switch (r.kind) {
      case RecordKind::Chat: ++current->sum.chats; break;
      case RecordKind::Action: current->action(r); break;
      case RecordKind::System: current->system(r); break;
    }
  }
  close(nullptr);
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const auto start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

UtteranceStats utterance_stats(const std::vector<LogRecord>& records) {
  UtteranceStats s;
  std::set<std::string> vocab;
  long tokens = 0;
  for (const auto& r : records) {
    if (r.kind != RecordKind::Chat) continue;
    ++s.utterances;
    for (auto& t : tokenize(r.text)) {
      ++tokens;
      vocab.insert(lower(t));
    }
  }
  s.vocabulary = static_cast<long>(vocab.size());
  s.mean_tokens = s.utterances ? static_cast<double>(tokens) / static_cast<double>(s.utterances) : 0.0;
  return s;
}

std::string_view skill_id(Skill s) {
  switch (s) {
    case Skill::MaintainingCommunication: return "MAINTAINING_COMMUNICATION";
    case Skill::SharingInformation: return "SHARING_INFORMATION";
    case Skill::EstablishingSharedUnderstanding: return "ESTABLISHING_SHARED_UNDERSTANDING";
    case Skill::Negotiating: return "NEGOTIATING";
    case Skill::RepresentingFormulating: return "REPRESENTING_FORMULATING";
    case Skill::Planning: return "PLANNING";
    case Skill::ExecutingActions: return "EXECUTING_ACTIONS";
    case Skill::Monitoring: return "MONITORING";
  }
  return "?";
}

std::string_view skill_label(Skill s) {
  switch (s) {
    case Skill::MaintainingCommunication: return "Maintaining communication";
    case Skill::SharingInformation: return "Sharing information";
    case Skill::EstablishingSharedUnderstanding: return "Establishing shared understanding";
    case Skill::Negotiating: return "Negotiating";
    case Skill::RepresentingFormulating: return "Representing and formulating";
    case Skill::Planning: return "Planning";
    case Skill::ExecutingActions: return "Executing actions";
    case Skill::Monitoring: return "Monitoring";
  }
  return "?";
}

std::string_view dimension(Skill s) {
  return static_cast<int>(s) <= static_cast<int>(Skill::Negotiating) ? "Social" : "Cognitive";
}

std::optional<Skill> parse_skill(std::string_view s) {
  const auto want = lower(s);
  for (auto k : kSkills) {
    if (lower(skill_id(k)) == want || lower(skill_label(k)) == want) return k;
  }
  return std::nullopt;
}

Expected<AnnotationSet, std::vector<AnnotationIssue>> parse_annotations(std::string_view text) {
  AnnotationSet set;
  std::vector<AnnotationIssue> issues;
  std::istringstream in{std::string(text)};
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      issues.push_back({line_no, "expected index<TAB>skills"});
      continue;
    }
    const auto idx = line.substr(0, tab);
    if (idx.empty() || idx.size() > 9 || !std::all_of(idx.begin(), idx.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      issues.push_back({line_no, "bad index \"" + idx + "\""});
      continue;
    }
    std::vector<Skill> skills;
    bool ok = true;
    std::stringstream list(line.substr(tab + 1));
    for (std::string item; std::getline(list, item, ',');) {
      const auto a = item.find_first_not_of(" \t");
      const auto b = item.find_last_not_of(" \t");
      const auto trimmed = a == std::string::npos ? std::string() : item.substr(a, b - a + 1);
      const auto skill = parse_skill(trimmed);
      if (!skill) {
        issues.push_back({line_no, "unknown skill \"" + trimmed + "\""});
        ok = false;
        break;
      }
      if (std::find(skills.begin(), skills.end(), *skill) == skills.end()) skills.push_back(*skill);
    }
    if (!ok) continue;
    if (skills.empty()) {
      issues.push_back({line_no, "no skills"});
      continue;
    }
    set.entries.emplace_back(std::stoi(idx), std::move(skills));
  }
  if (!issues.empty()) return unexpected(std::move(issues));
  return set;
}

std::string serialize_annotations(const AnnotationSet& set) {
  std::string out;
  for (const auto& [idx, skills] : set.entries) {
    out += std::to_string(idx) + "\t";
    for (std::size_t i = 0; i < skills.size(); ++i) {
      if (i) out += ",";
      out += skill_id(skills[i]);
    }
    out += "\n";
  }
  return out;
}

namespace {

std::vector<const LogRecord*> chats_of(const std::vector<LogRecord>& records) {
  std::vector<const LogRecord*> out;
  for (const auto& r : records) {
    if (r.kind == RecordKind::Chat) out.push_back(&r);
  }
  return out;
}

}  // namespace

Expected<SkillSummary, std::string> skill_summary(const std::vector<LogRecord>& records, const AnnotationSet& set) {
  const auto chats = chats_of(records);
  SkillSummary out;
  out.utterances = static_cast<long>(chats.size());
  std::array<long, kSkills.size()> counts{};
  std::array<long, kSkills.size()> tokens{};
  std::set<int> seen;
  for (const auto& [idx, skills] : set.entries) {
    if (idx < 0 || idx >= static_cast<int>(chats.size())) {
      return unexpected("annotation index " + std::to_string(idx) + " has no utterance (log has " +
                        std::to_string(chats.size()) + ")");
    }
    if (!seen.insert(idx).second) return unexpected("annotation index " + std::to_string(idx) + " appears twice");
    const auto n = static_cast<long>(tokenize(chats[static_cast<std::size_t>(idx)]->text).size());
    for (auto s : std::set<Skill>(skills.begin(), skills.end())) {
      ++counts[static_cast<std::size_t>(s)];
      tokens[static_cast<std::size_t>(s)] += n;
    }
  }
  out.annotated = static_cast<long>(seen.size());
  for (auto s : kSkills) {
    const auto i = static_cast<std::size_t>(s);
    SkillRow row{s, counts[i], std::nullopt};
    if (counts[i] > 0) row.mean_tokens = static_cast<double>(tokens[i]) / static_cast<double>(counts[i]);
    out.labels += counts[i];
    out.rows.push_back(row);
  }
  return out;
}

double skill_share(const std::vector<LogRecord>& records, const AnnotationSet& set, const std::vector<Skill>& skills) {
  const auto chats = chats_of(records);
  if (chats.empty()) return 0.0;
  std::set<int> hit;
  for (const auto& [idx, labels] : set.entries) {
    if (std::any_of(labels.begin(), labels.end(),
                    [&](Skill s) { return std::find(skills.begin(), skills.end(), s) != skills.end(); })) {
      hit.insert(idx);
    }
  }
  return static_cast<double>(hit.size()) / static_cast<double>(chats.size());
}

std::string heatmap_table(const Heatmap& h, char sep) {
  std::string out = std::string("x") + sep + "y" + sep + "count\n";
  for (int y = 0; y < h.height; ++y) {
    for (int x = 0; x < h.width; ++x) {
      out += std::to_string(x) + sep + std::to_string(y) + sep + std::to_string(h.at(x, y)) + "\n";
    }
  }
  return out;
}

std::string rounds_table(const std::vector<RoundSummary>& rounds, char sep) {
  const char* cols[] = {"room", "level", "round", "starting_gold", "spent", "refunds", "bounties", "unspent",
                        "buys", "sells", "upgrades", "kills", "leaks", "final_health", "score", "chats",
                        "outcome", "complete", "mismatch"};
  std::string out;
  for (std::size_t i = 0; i < std::size(cols); ++i) {
    if (i) out += sep;
    out += cols[i];
  }
  out += "\n";
  for (const auto& r : rounds) {
    const std::vector<std::string> cells = {
        r.room, std::to_string(r.level), std::to_string(r.round), std::to_string(r.starting_gold),
        std::to_string(r.spent), std::to_string(r.refunds), std::to_string(r.bounties), std::to_string(r.unspent),
        std::to_string(r.buys), std::to_string(r.sells), std::to_string(r.upgrades), std::to_string(r.kills),
        std::to_string(r.leaks), std::to_string(r.final_health), real(r.score, 2), std::to_string(r.chats),
        r.outcome, r.complete ? "1" : "0", r.mismatch ? "1" : "0"};
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += sep;
      out += cells[i];
    }
    out += "\n";
  }
  return out;
}

std::string chat_table(const UtteranceStats& stats, const SkillSummary* skills, char sep) {
  std::string out = std::string("utterances") + sep + "vocabulary" + sep + "mean_tokens\n";
  out += std::to_string(stats.utterances) + sep + std::to_string(stats.vocabulary) + sep +
         real(stats.mean_tokens, 2) + "\n";
  if (!skills) return out;
  out += "\n# counts are per label: an utterance with several skills counts once for each\n";
  out += std::string("dimension") + sep + "skill" + sep + "count" + sep + "avg_tokens\n";
  for (const auto& row : skills->rows) {
    out += std::string(dimension(row.skill)) + sep + std::string(skill_label(row.skill)) + sep +
           std::to_string(row.count) + sep + (row.mean_tokens ? real(*row.mean_tokens, 1) : "\xe2\x80\x94") + "\n";
  }
  return out;
}

}  // namespace taskforge::analysis
