#include <algorithm>
#include <cmath>
#include <set>

#include "taskforge/config/config.hpp"

namespace taskforge {

namespace {

struct ErrorInfo {
  ConfigError error;
  std::string_view code;
  std::string_view message;
};

constexpr ErrorInfo kErrors[] = {
    {ConfigError::NoLevels, "E001", "no levels"},
    {ConfigError::BadRounds, "E002", "rounds per level must be at least 1"},
    {ConfigError::BadTeamSize, "E003", "team must have 1 to 8 slots"},
    {ConfigError::MapTooSmall, "E004", "map smaller than 4x4"},
    {ConfigError::TileCountMismatch, "E005", "tile count does not match map size"},
    {ConfigError::BaseNotOnBase, "E006", "base cell is not a base tile"},
    {ConfigError::RouteTooShort, "E007", "route needs at least two cells"},
    {ConfigError::RouteOutOfBounds, "E008", "route leaves the map"},
    {ConfigError::RouteNotAdjacent, "E009", "route not 4-adjacent"},
    {ConfigError::RouteNotOnPath, "E010", "route crosses a non-path tile"},
    {ConfigError::RouteNotAtBase, "E011", "route does not end at the base"},
    {ConfigError::SpawnUnknownRoute, "E012", "spawn point references an unknown route"},
    {ConfigError::SpawnNotOnRouteHead, "E013", "spawn point not on a route head"},
    {ConfigError::SpawnUnknownEnemy, "E014", "spawn entry references an unknown enemy"},
    {ConfigError::SpawnTimesDecreasing, "E015", "spawn times decrease"},
    {ConfigError::DuplicateId, "E016", "duplicate id"},
    {ConfigError::BadEnemyStats, "E017", "enemy stats must be positive"},
    {ConfigError::BadTowerStats, "E018", "invalid tower stats"},
    {ConfigError::AssignmentUnknownTower, "E019", "assignment references a missing tower spec"},
    {ConfigError::DuplicateColor, "E020", "player colors not unique"},
    {ConfigError::BadSlotIds, "E021", "slot ids must be 0..n-1 in order"},
    {ConfigError::NegativeGold, "E022", "starting gold is negative"},
    {ConfigError::BadHealth, "E023", "starting health must be positive"},
    {ConfigError::NegativePlanning, "E024", "planning time is negative"},
    {ConfigError::PreplacedUnknownTower, "E025", "pre-placed tower references a missing spec"},
    {ConfigError::PreplacedBadCell, "E026", "pre-placed tower on an invalid or shared cell"},
    {ConfigError::SelectionTargetMissing, "E027", "selection target missing"},
    {ConfigError::ReferenceLayoutMissing, "E028", "reference layout missing"},
    {ConfigError::NoBuildableArea, "E029", "no buildable cells"},
    {ConfigError::PreplacedMissing, "E030", "object modes need pre-placed towers"},
    {ConfigError::BadScoreWeights, "E031", "score weights must be finite and non-negative"},
    {ConfigError::BadRefundRate, "E032", "refund rate outside [0, 1]"},
    {ConfigError::BadOrientation, "E033", "orientation outside 0..3"},
    {ConfigError::ObjectModePlanning, "E034", "object modes need a positive planning time"},
    {ConfigError::SpawnHeadShared, "E035", "route head used by more than one spawn point"},
};

const ErrorInfo& info(ConfigError e) {
  for (const auto& i : kErrors) {
    if (i.error == e) return i;
  }
  return kErrors[0];
}

bool adjacent(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y) == 1; }

class Checker {
 public:
  std::vector<ValidationIssue> issues;
  void add(ConfigError e, std::string path) { issues.push_back({e, std::move(path)}); }
};

void check_map(const GridMap& map, const std::string& path, Checker& c) {
  if (map.width < 4 || map.height < 4) c.add(ConfigError::MapTooSmall, path);
  if (static_cast<int>(map.tiles.size()) != map.width * map.height) {
    c.add(ConfigError::TileCountMismatch, path);
    return;
  }
  if (!map.in_bounds(map.base_cell) || map.at(map.base_cell) != TileKind::Base) {
    c.add(ConfigError::BaseNotOnBase, path + ".base");
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < map.routes.size(); ++i) {
    const auto& r = map.routes[i];
    const std::string rp = path + ".routes[" + std::to_string(i) + "]";
    if (!ids.insert(r.id).second) c.add(ConfigError::DuplicateId, rp + ".id");
    if (r.waypoints.size() < 2) {
      c.add(ConfigError::RouteTooShort, rp);
      continue;
    }
    bool bounds_ok = true;
    for (std::size_t k = 0; k < r.waypoints.size(); ++k) {
      const auto cell = r.waypoints[k];
      const std::string cp = rp + ".cells[" + std::to_string(k) + "]";
      if (!map.in_bounds(cell)) {
        c.add(ConfigError::RouteOutOfBounds, cp);
        bounds_ok = false;
        continue;
      }
      if (k > 0 && !adjacent(r.waypoints[k - 1], cell)) c.add(ConfigError::RouteNotAdjacent, cp);
      const bool last = k + 1 == r.waypoints.size();
      if (!last && map.at(cell) != TileKind::Path) c.add(ConfigError::RouteNotOnPath, cp);
    }
    if (bounds_ok && r.waypoints.back() != map.base_cell) c.add(ConfigError::RouteNotAtBase, rp);
  }
}

}  // namespace

std::string_view code(ConfigError e) { return info(e).code; }
std::string_view message(ConfigError e) { return info(e).message; }

std::string ValidationIssue::to_string() const {
  return std::string(code(error)) + " " + path + ": " + std::string(message(error));
}

std::vector<ValidationIssue> validate_config(const SessionConfig& cfg) {
  Checker c;
  if (cfg.levels.empty()) c.add(ConfigError::NoLevels, "levels");
  if (cfg.rounds_per_level < 1) c.add(ConfigError::BadRounds, "rounds_per_level");
  if (cfg.team.empty() || cfg.team.size() > 8) c.add(ConfigError::BadTeamSize, "team");

  auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!finite_nonneg(cfg.score.w_unspent) || !finite_nonneg(cfg.score.w_points) ||
      !finite_nonneg(cfg.score.w_health)) {
    c.add(ConfigError::BadScoreWeights, "score");
  }
  for (double rate : {cfg.refund.planning, cfg.refund.attack}) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
      c.add(ConfigError::BadRefundRate, "refund");
      break;
    }
  }

  std::set<std::string> tower_ids;
  for (std::size_t i = 0; i < cfg.tower_catalog.size(); ++i) {
    const auto& t = cfg.tower_catalog[i];
    const std::string p = "towers[" + std::to_string(i) + "]";
    if (t.id.empty() || !tower_ids.insert(t.id).second) c.add(ConfigError::DuplicateId, p + ".id");
    bool ok = t.cost >= 0 && t.upgrade_cost >= 0 && t.range >= 0.0 && std::isfinite(t.range) &&
              std::isfinite(t.damage) && t.damage >= 0.0 && std::isfinite(t.firerate) && t.firerate >= 0.0;
    if (attacks(t.archetype) && t.archetype != Archetype::Obstacle && !(t.firerate > 0.0)) ok = false;
    if ((t.archetype == Archetype::Discount || t.archetype == Archetype::Support) && t.damage != 0.0) ok = false;
    const auto& fx = t.effects;
    if (!(fx.slow_multiplier > 0.0 && fx.slow_multiplier < 1.0)) ok = false;
    if (!(fx.discount_multiplier >= 0.0 && fx.discount_multiplier <= 1.0)) ok = false;
    if (!(fx.sniper_reference_speed > 0.0) || !(fx.sniper_cap >= 1.0)) ok = false;
    if (fx.support_buff < 0.0 || fx.trap_charges < 0 || fx.poison_dps < 0.0) ok = false;
    if (!ok) c.add(ConfigError::BadTowerStats, p);
  }

  std::set<std::string> enemy_ids;
  for (std::size_t i = 0; i < cfg.enemy_catalog.size(); ++i) {
    const auto& e = cfg.enemy_catalog[i];
    const std::string p = "enemies[" + std::to_string(i) + "]";
    if (e.id.empty() || !enemy_ids.insert(e.id).second) c.add(ConfigError::DuplicateId, p + ".id");
    if (!(e.max_health > 0.0) || !(e.speed > 0.0) || e.points <= 0 || e.bounty <= 0) {
      c.add(ConfigError::BadEnemyStats, p);
    }
  }

  std::set<std::string> colors;
  for (std::size_t i = 0; i < cfg.team.size(); ++i) {
    const auto& a = cfg.team[i];
    const std::string p = "team[" + std::to_string(i) + "]";
    if (a.slot != static_cast<int>(i)) c.add(ConfigError::BadSlotIds, p + ".slot");
    if (!colors.insert(a.color).second) c.add(ConfigError::DuplicateColor, p + ".color");
    for (std::size_t k = 0; k < a.towers.size(); ++k) {
      if (!tower_ids.count(a.towers[k])) {
        c.add(ConfigError::AssignmentUnknownTower, p + ".towers[" + std::to_string(k) + "]");
      }
    }
  }

  for (std::size_t li = 0; li < cfg.levels.size(); ++li) {
    const auto& level = cfg.levels[li];
    const std::string lp = "levels[" + std::to_string(li) + "]";
    const auto& map = level.map;
    check_map(map, lp + ".map", c);
    if (level.starting_gold < 0) c.add(ConfigError::NegativeGold, lp + ".starting_gold");
    if (level.starting_health <= 0) c.add(ConfigError::BadHealth, lp + ".starting_health");
    if (!(level.planning_seconds >= 0.0)) c.add(ConfigError::NegativePlanning, lp + ".planning_seconds");
    const bool tiles_ok = static_cast<int>(map.tiles.size()) == map.width * map.height;

    std::set<std::string> spawn_ids;
    std::set<std::string> heads_used;
    for (std::size_t si = 0; si < map.spawn_points.size(); ++si) {
      const auto& s = map.spawn_points[si];
      const std::string sp = lp + ".spawns[" + std::to_string(si) + "]";
      if (!spawn_ids.insert(s.id).second) c.add(ConfigError::DuplicateId, sp + ".id");
      const auto* route = map.find_route(s.route_id);
      if (!route) {
        c.add(ConfigError::SpawnUnknownRoute, sp + ".route");
      } else {
        if (route->waypoints.empty() || (tiles_ok && map.in_bounds(route->waypoints.front()) &&
                                         map.at(route->waypoints.front()) != TileKind::Path)) {
          c.add(ConfigError::SpawnNotOnRouteHead, sp);
        }
        if (!heads_used.insert(s.route_id).second) c.add(ConfigError::SpawnHeadShared, sp + ".route");
      }
      double last = -1.0;
      for (std::size_t ei = 0; ei < s.entries.size(); ++ei) {
        const auto& e = s.entries[ei];
        const std::string ep = sp + ".entries[" + std::to_string(ei) + "]";
        if (!enemy_ids.count(e.variant_id)) c.add(ConfigError::SpawnUnknownEnemy, ep);
        if (e.spawn_time < last || e.spawn_time < 0.0) c.add(ConfigError::SpawnTimesDecreasing, ep);
        last = e.spawn_time;
      }
    }

    std::set<Cell> occupied;
    auto check_placements = [&](const std::vector<Placement>& list, const std::string& key) {
      for (std::size_t pi = 0; pi < list.size(); ++pi) {
        const auto& p = list[pi];
        const std::string pp = lp + "." + key + "[" + std::to_string(pi) + "]";
        if (!tower_ids.count(p.spec_id)) c.add(ConfigError::PreplacedUnknownTower, pp + ".tower");
        if (p.orientation < 0 || p.orientation > 3) c.add(ConfigError::BadOrientation, pp + ".orientation");
        const bool cell_ok = tiles_ok && map.in_bounds(p.cell) && map.at(p.cell) == TileKind::Buildable;
        if (!cell_ok || !occupied.insert(p.cell).second) c.add(ConfigError::PreplacedBadCell, pp + ".cell");
      }
    };
    check_placements(level.preplaced, "preplaced");
    occupied.clear();
    check_placements(level.reference_layout, "reference_layout");

    switch (cfg.mode) {
      case GameMode::TowerDefense:
        if (tiles_ok && map.count(TileKind::Buildable) == 0) c.add(ConfigError::NoBuildableArea, lp + ".map");
        break;
      case GameMode::ObjectSelection:
        if (level.preplaced.empty()) c.add(ConfigError::PreplacedMissing, lp + ".preplaced");
        if (!level.selection_target || *level.selection_target < 0 ||
            *level.selection_target >= static_cast<int>(level.preplaced.size())) {
          c.add(ConfigError::SelectionTargetMissing, lp + ".selection_target");
        }
        if (!(level.planning_seconds > 0.0)) c.add(ConfigError::ObjectModePlanning, lp + ".planning_seconds");
        break;
      case GameMode::ObjectManipulation:
        if (level.reference_layout.empty()) c.add(ConfigError::ReferenceLayoutMissing, lp + ".reference_layout");
        if (!(level.planning_seconds > 0.0)) c.add(ConfigError::ObjectModePlanning, lp + ".planning_seconds");
        break;
    }
  }
  return std::move(c.issues);
}

}  // namespace taskforge
