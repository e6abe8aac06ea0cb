#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "taskforge/config/config.hpp"

namespace taskforge {

namespace {

std::string fmt_number(double v) {
  char buf[64];
  if (std::abs(v - std::round(v)) < 1e-9) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.2f", v);
  }
  return buf;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string range_text(double lo, double hi) {
  return lo == hi ? fmt_number(lo) : fmt_number(lo) + "-" + fmt_number(hi);
}

std::string q1(const SessionConfig& cfg) {
  switch (cfg.mode) {
    case GameMode::ObjectSelection:
      return "Binary: correct iff the selected tower is the target tower";
    case GameMode::ObjectManipulation:
      return "Binary win/lose: win iff the placed layout matches the reference layout (layout score 1)";
    case GameMode::TowerDefense:
      break;
  }
  if (cfg.score.mode == ScoreMode::Binary) return "Binary win/lose";
  return "Linear score: " + fmt_number(cfg.score.w_unspent) + " x unspent money + " +
         fmt_number(cfg.score.w_points) + " x kill points + " + fmt_number(cfg.score.w_health) +
         " x base health";
}

std::string q2(const SessionConfig& cfg) {
  if (cfg.levels.empty()) return "no levels";
  double plan_lo = cfg.levels.front().planning_seconds;
  double plan_hi = plan_lo;
  double atk_lo = scripted_attack_seconds(cfg, cfg.levels.front());
  double atk_hi = atk_lo;
  for (const auto& l : cfg.levels) {
    plan_lo = std::min(plan_lo, l.planning_seconds);
    plan_hi = std::max(plan_hi, l.planning_seconds);
    const double a = scripted_attack_seconds(cfg, l);
    atk_lo = std::min(atk_lo, a);
    atk_hi = std::max(atk_hi, a);
  }
  std::string out = range_text(plan_lo, plan_hi) + " s planning";
  if (cfg.mode == GameMode::TowerDefense) {
    out += " and up to " + range_text(std::ceil(atk_lo), std::ceil(atk_hi)) + " s attack";
  } else {
    out += " (planning only)";
  }
  return out + " per round";
}

std::string q3(const SessionConfig& cfg) {
  std::vector<std::string> spawns;
  std::vector<std::string> buildable;
  for (const auto& l : cfg.levels) {
    spawns.push_back(std::to_string(l.map.spawn_points.size()));
    buildable.push_back(std::to_string(l.map.count(TileKind::Buildable)));
  }
  std::string out = std::to_string(cfg.levels.size()) + (cfg.levels.size() == 1 ? " level" : " levels") +
                    " x " + std::to_string(cfg.rounds_per_level) +
                    (cfg.rounds_per_level == 1 ? " round" : " rounds") + " each";
  if (cfg.levels.size() > 1) {
    out += "; spawn points per level " + join(spawns, ", ") + "; buildable cells per level " + join(buildable, ", ");
  }
  return out;
}

std::string q4(const SessionConfig& cfg) {
  std::vector<std::string> labels;
  for (const auto& a : cfg.team) labels.push_back(a.agent == AgentKind::Human ? "H" : "AI");
  return labels.empty() ? "no players" : join(labels, "-");
}

std::string q5(const SessionConfig& cfg) {
  if (cfg.team.empty()) return "no players";
  std::vector<std::set<std::string>> sets;
  for (const auto& a : cfg.team) sets.emplace_back(a.towers.begin(), a.towers.end());
  if (std::all_of(sets.begin(), sets.end(), [&](const auto& s) { return s == sets.front(); })) {
    return "Symmetric: every player has the same towers";
  }
  std::vector<std::string> parts;
  for (const auto& a : cfg.team) {
    parts.push_back("slot " + std::to_string(a.slot) + ": " + (a.towers.empty() ? "none" : join(a.towers, ", ")));
  }
  return "Asymmetric: " + join(parts, "; ");
}

std::string q6(const SessionConfig& cfg) {
  std::map<std::string, int> holders;
  for (const auto& a : cfg.team) {
    for (const auto& t : std::set<std::string>(a.towers.begin(), a.towers.end())) ++holders[t];
  }
  std::string out;
  const bool exclusive =
      !holders.empty() && std::all_of(holders.begin(), holders.end(), [](const auto& h) { return h.second == 1; });
  if (cfg.team.size() <= 1) {
    out = "Single player";
  } else if (exclusive) {
    out = "Each tower type belongs to one player; players depend on each other's towers";
  } else {
    out = "Tower sets overlap";
  }
  out += cfg.money_model == MoneyModel::Shared ? "; shared money pool" : "; individual money pools";
  return out + "; shared base health and score";
}

std::string q8(const SessionConfig& cfg) {
  std::string out = "All players see the same board state";
  out += cfg.money_model == MoneyModel::Shared ? " and one shared money pool" : "; each player sees their own money";
  std::vector<std::string> hidden;
  if (!cfg.visibility.tower_names) hidden.push_back("tower names");
  if (!cfg.visibility.tower_descriptions) hidden.push_back("tower descriptions");
  if (!cfg.visibility.coordinate_grid) hidden.push_back("coordinate grid");
  if (!hidden.empty()) out += "; hidden: " + join(hidden, ", ");
  out += cfg.visibility.spawn_preview ? "; enemy sequence previewed" : "; players must discover the enemy sequence";
  return out;
}

bool high_stress(const SessionConfig& cfg) {
  for (const auto& l : cfg.levels) {
    if (l.planning_seconds < scripted_attack_seconds(cfg, l)) return true;
    if (l.min_win_cost && l.starting_gold < *l.min_win_cost) return true;
  }
  return false;
}

std::string q10(const CommFlags& c) {
  if (c.text_chat && c.voice) return "text, voice";
  if (c.text_chat) return "text";
  if (c.voice) return "voice";
  return "none";
}

}  // namespace

double scripted_attack_seconds(const SessionConfig& cfg, const LevelSpec& level) {
  double latest = 0.0;
  for (const auto& s : level.map.spawn_points) {
    const auto* route = level.map.find_route(s.route_id);
    const double length = route ? route->total_length() : 0.0;
    for (const auto& e : s.entries) {
      const auto* v = cfg.find_enemy(e.variant_id);
      const double travel = v && v->speed > 0.0 ? length / v->speed : 0.0;
      latest = std::max(latest, e.spawn_time + travel);
    }
  }
  return latest;
}

ChecklistAnswers checklist_report(const SessionConfig& cfg) {
  ChecklistAnswers a;
  a.q1 = q1(cfg);
  a.q2 = q2(cfg);
  a.q3 = q3(cfg);
  a.q4 = q4(cfg);
  a.q5 = q5(cfg);
  a.q6 = q6(cfg);
  a.q7 = cfg.solution_space_note.empty() ? "Not annotated" : cfg.solution_space_note;
  a.q8 = q8(cfg);
  a.q9 = high_stress(cfg) ? "high stress" : "low/moderate";
  a.q10 = q10(cfg.comm);
  return a;
}

}  // namespace taskforge
