#include <algorithm>
#include <cmath>

#include "taskforge/config/session_config.hpp"
#include "taskforge/sim/game.hpp"
#include "taskforge/sim/types.hpp"

namespace taskforge {

int seconds_to_ticks(double seconds) {
  return static_cast<int>(std::llround(seconds * kTickRate));
}

std::string to_string(Cell c) {
  return "(" + std::to_string(c.x) + ", " + std::to_string(c.y) + ")";
}

const PathRoute* GridMap::find_route(std::string_view id) const {
  for (const auto& r : routes) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

const SpawnScript* GridMap::find_spawn(std::string_view id) const {
  for (const auto& s : spawn_points) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

int GridMap::count(TileKind k) const {
  return static_cast<int>(std::count(tiles.begin(), tiles.end(), k));
}

namespace {

constexpr std::array<std::string_view, 12> kArchetypeNames = {
    "BASIC", "POISON", "PIERCING", "SPLASH", "OBSTACLE", "SLOW",
    "FEAR",  "SNIPER", "DISCOUNT", "SUPPORT", "MULTISHOT", "MAP",
};

constexpr std::array<std::string_view, 3> kTrackNames = {"RANGE", "DAMAGE", "FIRERATE"};

}  // namespace

std::string_view to_string(Archetype a) { return kArchetypeNames[static_cast<std::size_t>(a)]; }

std::optional<Archetype> parse_archetype(std::string_view s) {
  for (std::size_t i = 0; i < kArchetypeNames.size(); ++i) {
    if (kArchetypeNames[i] == s) return static_cast<Archetype>(i);
  }
  return std::nullopt;
}

std::string_view to_string(UpgradeTrack t) { return kTrackNames[static_cast<std::size_t>(t)]; }

std::optional<UpgradeTrack> parse_track(std::string_view s) {
  for (std::size_t i = 0; i < kTrackNames.size(); ++i) {
    if (kTrackNames[i] == s) return static_cast<UpgradeTrack>(i);
  }
  return std::nullopt;
}

std::string_view to_string(GameMode m) {
  switch (m) {
    case GameMode::TowerDefense: return "TOWER_DEFENSE";
    case GameMode::ObjectSelection: return "OBJECT_SELECTION";
    case GameMode::ObjectManipulation: return "OBJECT_MANIPULATION";
  }
  return "?";
}

std::string_view to_string(MoneyModel m) { return m == MoneyModel::Shared ? "SHARED" : "INDIVIDUAL"; }
std::string_view to_string(SellPolicy p) { return p == SellPolicy::Anyone ? "ANYONE" : "OWNER_ONLY"; }
std::string_view to_string(ScoreMode m) { return m == ScoreMode::Binary ? "BINARY" : "LINEAR"; }

const TowerSpec* SessionConfig::find_tower(std::string_view id) const {
  for (const auto& t : tower_catalog) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

const EnemyVariant* SessionConfig::find_enemy(std::string_view id) const {
  for (const auto& e : enemy_catalog) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Planning: return "PLANNING";
    case Phase::Attack: return "ATTACK";
    case Phase::Ended: return "ENDED";
  }
  return "?";
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Ongoing: return "ONGOING";
    case Outcome::Win: return "WIN";
    case Outcome::Lose: return "LOSE";
  }
  return "?";
}

std::string_view to_string(EffectKind k) {
  switch (k) {
    case EffectKind::Slow: return "SLOW";
    case EffectKind::Poison: return "POISON";
    case EffectKind::Fear: return "FEAR";
  }
  return "?";
}

std::string_view to_string(CommandKind k) {
  switch (k) {
    case CommandKind::Place: return "PLACE";
    case CommandKind::Sell: return "SELL";
    case CommandKind::Upgrade: return "UPGRADE";
    case CommandKind::Ready: return "READY";
    case CommandKind::Select: return "SELECT";
  }
  return "?";
}

std::optional<CommandKind> parse_command_kind(std::string_view s) {
  for (auto k : {CommandKind::Place, CommandKind::Sell, CommandKind::Upgrade, CommandKind::Ready,
                 CommandKind::Select}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::string_view error_code(CommandError e) {
  switch (e) {
    case CommandError::InvalidPayload: return "invalid_payload";
    case CommandError::PhaseViolation: return "phase_violation";
    case CommandError::UnknownSpec: return "unknown_spec";
    case CommandError::SpecNotAssigned: return "spec_not_assigned";
    case CommandError::CellNotBuildable: return "cell_not_buildable";
    case CommandError::CellOccupied: return "cell_occupied";
    case CommandError::InsufficientFunds: return "insufficient_funds";
    case CommandError::UnknownTower: return "unknown_tower";
    case CommandError::NotOwner: return "not_owner";
    case CommandError::MaxUpgradeLevel: return "max_upgrade_level";
  }
  return "?";
}

std::string_view error_message(CommandError e) {
  switch (e) {
    case CommandError::InvalidPayload: return "invalid payload";
    case CommandError::PhaseViolation: return "phase violation";
    case CommandError::UnknownSpec: return "unknown tower spec";
    case CommandError::SpecNotAssigned: return "tower not assigned to player";
    case CommandError::CellNotBuildable: return "cell not buildable";
    case CommandError::CellOccupied: return "cell occupied";
    case CommandError::InsufficientFunds: return "insufficient funds";
    case CommandError::UnknownTower: return "no tower at cell";
    case CommandError::NotOwner: return "tower owned by another player";
    case CommandError::MaxUpgradeLevel: return "max upgrade level reached";
  }
  return "?";
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::Placed: return "PLACED";
    case EventKind::Sold: return "SOLD";
    case EventKind::Upgraded: return "UPGRADED";
    case EventKind::Spawned: return "SPAWNED";
    case EventKind::Killed: return "KILLED";
    case EventKind::Leaked: return "LEAKED";
    case EventKind::PhaseChanged: return "PHASE_CHANGED";
    case EventKind::RoundEnded: return "ROUND_ENDED";
  }
  return "?";
}

}  // namespace taskforge
