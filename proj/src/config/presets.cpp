#include <stdexcept>

#include "taskforge/config/config.hpp"

namespace taskforge {

namespace {

struct RouteDraft {
  std::string id;
  Cell start;
  std::string moves;  // "E6 S6 E9"
};

std::vector<Cell> walk(Cell start, std::string_view moves) {
  std::vector<Cell> cells{start};
  std::size_t i = 0;
  while (i < moves.size()) {
    if (moves[i] == ' ') {
      ++i;
      continue;
    }
    const char dir = moves[i++];
    int steps = 0;
    while (i < moves.size() && moves[i] >= '0' && moves[i] <= '9') steps = steps * 10 + (moves[i++] - '0');
    const int dx = dir == 'E' ? 1 : dir == 'W' ? -1 : 0;
    const int dy = dir == 'S' ? 1 : dir == 'N' ? -1 : 0;
    for (int k = 0; k < steps; ++k) cells.push_back({cells.back().x + dx, cells.back().y + dy});
  }
  return cells;
}

// Every route ends on the base; cells not on a route are buildable unless listed as blocked.
GridMap build_map(int width, int height, const std::vector<RouteDraft>& drafts, const std::vector<Cell>& blocked) {
  GridMap map;
  map.width = width;
  map.height = height;
  map.tiles.assign(static_cast<std::size_t>(width * height), TileKind::Buildable);
  for (auto c : blocked) map.set(c, TileKind::Blocked);
  for (const auto& d : drafts) {
    PathRoute r{d.id, walk(d.start, d.moves)};
    for (std::size_t i = 0; i + 1 < r.waypoints.size(); ++i) map.set(r.waypoints[i], TileKind::Path);
    map.base_cell = r.waypoints.back();
    map.routes.push_back(std::move(r));
  }
  map.set(map.base_cell, TileKind::Base);
  return map;
}

std::vector<Cell> rect(int x0, int y0, int x1, int y1) {
  std::vector<Cell> out;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) out.push_back({x, y});
  }
  return out;
}

std::vector<Cell> concat(std::vector<std::vector<Cell>> parts) {
  std::vector<Cell> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// `pattern` cycles through the variants; one enemy every `gap` seconds from `offset`.
SpawnScript wave(std::string id, std::string route, const std::vector<std::string>& pattern, int count, double gap,
                 double offset = 0.0) {
  SpawnScript s{std::move(id), std::move(route), {}};
  for (int i = 0; i < count; ++i) {
    s.entries.push_back({pattern[static_cast<std::size_t>(i) % pattern.size()], offset + gap * i});
  }
  return s;
}

TowerSpec tower(std::string id, Archetype a, std::int64_t cost, std::int64_t upgrade, double range, double damage,
                double firerate, std::string name, std::string description) {
  TowerSpec t;
  t.id = std::move(id);
  t.archetype = a;
  t.cost = cost;
  t.upgrade_cost = upgrade;
  t.range = range;
  t.damage = damage;
  t.firerate = firerate;
  t.display_name = std::move(name);
  t.description = std::move(description);
  return t;
}

// Upgrades cost under half a new tower, so a +50% DAMAGE level beats a second copy per gold.
std::vector<TowerSpec> full_catalog() {
  return {
      tower("BASIC", Archetype::Basic, 400, 180, 3.0, 10, 1.0, "Basic", "Shoots the leading enemy in range."),
      tower("POISON", Archetype::Poison, 500, 220, 3.0, 2, 0.8, "Poison",
            "Poisons its target for damage over time."),
      tower("PIERCING", Archetype::Piercing, 700, 300, 4.0, 12, 0.5, "Piercing",
            "Fires a bolt that hits every enemy along its line."),
      tower("SPLASH", Archetype::Splash, 800, 350, 3.0, 8, 0.6, "Splash",
            "Damages every enemy near the target."),
      tower("OBSTACLE", Archetype::Obstacle, 600, 270, 2.0, 25, 1.0, "Obstacle",
            "Lays a trap on the nearest path tile that damages passing enemies."),
      tower("SLOW", Archetype::Slow, 500, 220, 3.0, 2, 1.0, "Slow", "Slows its target."),
      tower("FEAR", Archetype::Fear, 900, 400, 3.0, 1, 0.5, "Fear",
            "Makes its target walk backwards for a while."),
      tower("SNIPER", Archetype::Sniper, 1000, 450, 7.0, 30, 0.4, "Sniper",
            "Long range; deals more damage to faster enemies."),
      tower("DISCOUNT", Archetype::Discount, 600, 270, 3.0, 0, 1.0, "Discount",
            "Makes upgrades cheaper for towers in range."),
      tower("SUPPORT", Archetype::Support, 800, 360, 2.5, 0, 1.0, "Support",
            "Boosts all stats of towers in range."),
      tower("MULTI", Archetype::Multishot, 700, 300, 4.0, 8, 1.0, "Multishot",
            "Fires in all four directions at once."),
      tower("MAP", Archetype::Map, 1200, 540, 0.0, 3, 0.25, "Map", "Damages every enemy on the map."),
  };
}

std::vector<EnemyVariant> enemy_catalog() {
  return {
      {"grunt", 60.0, 1.0, 10, 20},
      {"runner", 35.0, 2.0, 15, 25},
      {"tank", 300.0, 0.5, 50, 80},
  };
}

const char* const kColors[] = {"#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#46f0f0", "#f032e6", "#bcf60c"};

TowerAssignment slot(int id, std::vector<std::string> towers, AgentKind agent = AgentKind::Human) {
  return {id, agent, kColors[id], std::move(towers)};
}

// 16x16, base on the right edge; level k adds a k-th spawn point and blocks more green space.
LevelSpec case_study_level(int k) {
  std::vector<RouteDraft> routes = {{"north", {0, 2}, "E6 S6 E9"}};
  if (k >= 2) routes.push_back({"south", {0, 13}, "E6 N5 E9"});
  if (k >= 3) routes.push_back({"east", {14, 15}, "W4 N7 E5"});
  std::vector<Cell> blocked;
  if (k >= 2) blocked = concat({rect(12, 0, 15, 1), rect(0, 5, 1, 10)});
  if (k >= 3) blocked = concat({blocked, rect(12, 11, 15, 13), rect(7, 13, 8, 15)});

  LevelSpec l;
  l.name = "Level " + std::to_string(k);
  l.map = build_map(16, 16, routes, blocked);
  l.starting_gold = 20000;
  l.starting_health = 20;
  l.planning_seconds = 270.0 + 30.0 * k;
  const int count = 10 + 5 * k;
  l.map.spawn_points.push_back(wave("A", "north", {"grunt", "grunt", "runner"}, count, 1.5));
  if (k >= 2) l.map.spawn_points.push_back(wave("B", "south", {"grunt", "tank", "runner"}, count, 2.0, 1.0));
  if (k >= 3) l.map.spawn_points.push_back(wave("C", "east", {"runner", "grunt", "runner"}, count, 2.0, 2.0));
  return l;
}

SessionConfig case_study() {
  SessionConfig c;
  c.mode = GameMode::TowerDefense;
  for (int k = 1; k <= 3; ++k) c.levels.push_back(case_study_level(k));
  c.rounds_per_level = 3;
  c.team = {slot(0, {"BASIC", "SNIPER", "MAP"}), slot(1, {"POISON", "SPLASH", "PIERCING"}),
            slot(2, {"SLOW", "FEAR", "OBSTACLE"}), slot(3, {"DISCOUNT", "SUPPORT", "MULTI"})};
  c.money_model = MoneyModel::Shared;
  c.sell_policy = SellPolicy::OwnerOnly;
  c.interact_during_attack = false;
  c.comm = {true, false, false};
  c.score = {ScoreMode::Linear, 1.0, 1.0, 10.0};
  c.tower_catalog = full_catalog();
  c.enemy_catalog = enemy_catalog();
  c.solution_space_note = "Many placements win; surplus gold with upgrades slightly favored over new towers";
  return c;
}

SessionConfig tutorial() {
  SessionConfig c;
  LevelSpec l;
  l.name = "Tutorial";
  l.map = build_map(10, 8, {{"main", {0, 3}, "E9"}}, {});
  l.starting_gold = 2000;
  l.starting_health = 10;
  l.planning_seconds = 120.0;
  l.map.spawn_points.push_back(wave("A", "main", {"grunt"}, 5, 2.0));
  c.levels.push_back(std::move(l));
  c.team = {slot(0, {"BASIC", "SLOW"}), slot(1, {"BASIC", "SLOW"})};
  c.score = {ScoreMode::Binary, 0, 0, 0};
  c.tower_catalog = full_catalog();
  c.enemy_catalog = enemy_catalog();
  c.solution_space_note = "Any tower next to the path wins";
  return c;
}

SessionConfig stress() {
  SessionConfig c = case_study();
  c.levels = {case_study_level(2)};
  c.levels[0].name = "Stress";
  c.levels[0].planning_seconds = 30.0;
  c.levels[0].starting_gold = 1500;
  c.levels[0].min_win_cost = 3000;
  c.rounds_per_level = 1;
  c.interact_during_attack = true;
  c.comm = {true, true, false};
  c.score = {ScoreMode::Binary, 0, 0, 0};
  c.solution_space_note = "Several solutions; bounties must be reinvested during the attack";
  return c;
}

SessionConfig object_selection() {
  SessionConfig c;
  c.mode = GameMode::ObjectSelection;
  LevelSpec l;
  l.name = "Pick the tower";
  l.map = build_map(10, 8, {{"main", {0, 3}, "E9"}}, {});
  l.planning_seconds = 180.0;
  l.preplaced = {{"BASIC", {2, 1}, 0}, {"SLOW", {5, 1}, 0}, {"SNIPER", {2, 5}, 0}, {"SPLASH", {6, 5}, 0}};
  l.selection_target = 2;
  c.levels.push_back(std::move(l));
  c.team = {slot(0, {}), slot(1, {})};
  c.comm = {true, true, false};
  c.visibility.tower_names = false;
  c.visibility.tower_descriptions = false;
  c.score = {ScoreMode::Binary, 0, 0, 0};
  c.tower_catalog = full_catalog();
  c.enemy_catalog = enemy_catalog();
  c.solution_space_note = "Exactly one tower is correct";
  return c;
}

SessionConfig object_manipulation() {
  SessionConfig c;
  c.mode = GameMode::ObjectManipulation;
  LevelSpec l;
  l.name = "Copy the layout";
  l.map = build_map(10, 8, {{"main", {0, 3}, "E9"}}, {});
  l.starting_gold = 5000;
  l.planning_seconds = 240.0;
  l.reference_layout = {{"BASIC", {1, 1}, 1}, {"SLOW", {4, 5}, 2}, {"SPLASH", {7, 2}, 0}};
  c.levels.push_back(std::move(l));
  c.team = {slot(0, {}), slot(1, {"BASIC", "SLOW", "SPLASH"})};
  c.comm = {true, true, false};
  c.visibility.coordinate_grid = false;
  c.score = {ScoreMode::Binary, 0, 0, 0};
  c.tower_catalog = full_catalog();
  c.enemy_catalog = enemy_catalog();
  c.solution_space_note = "Exactly one layout is correct";
  return c;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"tutorial", "case-study", "stress", "object-selection", "object-manipulation"};
}

SessionConfig builtin_preset(std::string_view name) {
  if (name == "tutorial") return tutorial();
  if (name == "case-study") return case_study();
  if (name == "stress") return stress();
  if (name == "object-selection") return object_selection();
  if (name == "object-manipulation") return object_manipulation();
  throw std::invalid_argument("unknown preset \"" + std::string(name) + "\"");
}

}  // namespace taskforge
