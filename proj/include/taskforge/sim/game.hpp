#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "taskforge/config/session_config.hpp"
#include "taskforge/sim/types.hpp"
#include "taskforge/util/expected.hpp"

namespace taskforge {

enum class Phase : std::uint8_t { Planning, Attack, Ended };
enum class Outcome : std::uint8_t { Ongoing, Win, Lose };

std::string_view to_string(Phase p);
std::string_view to_string(Outcome o);

struct TowerInstance {
  int id = 0;  // placement order; pre-placed towers take 0..k-1
  std::string spec_id;
  int spec_index = 0;
  int owner = -1;  // player slot, -1 for level-authored towers
  Cell cell;
  int orientation = 0;
  std::array<int, 3> levels{0, 0, 0};  // indexed by UpgradeTrack
  double cooldown_ticks = 0.0;
  std::int64_t total_spent = 0;
  // OBSTACLE only
  std::optional<Cell> trap_cell;
  int trap_charges = 0;

  int level(UpgradeTrack t) const { return levels[static_cast<int>(t)]; }
};

enum class EffectKind : std::uint8_t { Slow, Poison, Fear };
std::string_view to_string(EffectKind k);

struct EffectState {
  EffectKind kind = EffectKind::Slow;
  double magnitude = 0.0;  // SLOW: speed multiplier, POISON: damage/s, FEAR: reverse multiplier
  int remaining_ticks = 0;
  int immunity_ticks = 0;  // FEAR only; counts down once the fear itself has expired
  bool active = false;     // set by the decay step for the current tick

  double remaining() const { return remaining_ticks * kTickSeconds; }
  double immunity_remaining() const { return immunity_ticks * kTickSeconds; }
};

struct EnemyInstance {
  int spawn_index = 0;
  std::string variant_id;
  int variant_index = 0;
  std::string route_id;
  int route_index = 0;
  double progress = 0.0;
  double prev_progress = 0.0;
  double health = 0.0;
  std::vector<EffectState> effects;

  const EffectState* effect(EffectKind k) const;
};

struct PendingSpawn {
  std::int64_t spawn_tick = 0;
  std::string variant_id;
  std::string route_id;
};

/// Running totals for the economy conservation identity.
struct Ledger {
  std::int64_t starting_gold = 0;
  std::int64_t bounties = 0;
  std::int64_t purchases = 0;  // placements and upgrades
  std::int64_t refunds = 0;
  int spawned = 0;
  int kills = 0;
  int leaks = 0;
};

struct GameState {
  std::shared_ptr<const SessionConfig> config;
  int level_index = 0;
  int round_index = 0;
  Phase phase = Phase::Planning;
  Outcome outcome = Outcome::Ongoing;
  std::int64_t tick = 0;
  double sim_time = 0.0;
  int planning_ticks_remaining = 0;
  std::vector<std::int64_t> money;  // one pool when shared, one per slot when individual
  std::int64_t health = 0;
  std::vector<TowerInstance> towers;
  std::vector<EnemyInstance> enemies;
  std::vector<PendingSpawn> pending_spawns;  // sorted by spawn tick, then script order
  std::int64_t kill_points = 0;
  std::vector<bool> ready;
  std::vector<bool> participating;
  int next_tower_id = 0;
  int next_spawn_index = 0;
  Ledger ledger;
  std::optional<int> selected_tower;
  std::optional<double> layout_score;

  const LevelSpec& level() const { return config->levels[static_cast<std::size_t>(level_index)]; }
  const GridMap& map() const { return level().map; }
  double planning_remaining() const { return planning_ticks_remaining * kTickSeconds; }
  std::int64_t total_money() const;
  const TowerInstance* tower_at(Cell c) const;
  const TowerInstance* find_tower(int id) const;
  const TowerSpec& spec_of(const TowerInstance& t) const;
  const EnemyVariant& variant_of(const EnemyInstance& e) const;
  const PathRoute& route_of(const EnemyInstance& e) const;
};

enum class CommandKind : std::uint8_t { Place, Sell, Upgrade, Ready, Select };
std::string_view to_string(CommandKind k);
std::optional<CommandKind> parse_command_kind(std::string_view s);

struct Command {
  int issuer = 0;
  CommandKind kind = CommandKind::Place;
  std::string spec_id;              // PLACE
  std::optional<Cell> cell;         // PLACE, SELL, UPGRADE, SELECT
  std::optional<UpgradeTrack> track;  // UPGRADE
  std::optional<int> tower_id;      // SELECT (alternative to cell)
  int orientation = 0;              // PLACE
  bool ready = true;                // READY (false unlatches)
};

enum class CommandError : std::uint8_t {
  InvalidPayload,
  PhaseViolation,
  UnknownSpec,
  SpecNotAssigned,
  CellNotBuildable,
  CellOccupied,
  InsufficientFunds,
  UnknownTower,
  NotOwner,
  MaxUpgradeLevel,
};

/// Stable machine-readable code, e.g. "cell_not_buildable".
std::string_view error_code(CommandError e);
/// Human-readable message, e.g. "cell not buildable".
std::string_view error_message(CommandError e);

enum class EventKind : std::uint8_t {
  Placed,
  Sold,
  Upgraded,
  Spawned,
  Killed,
  Leaked,
  PhaseChanged,
  RoundEnded,
};
std::string_view to_string(EventKind k);

struct SimEvent {
  EventKind kind = EventKind::Placed;
  std::int64_t tick = 0;
  int actor = -1;              // issuing slot for player actions
  std::optional<Cell> cell;
  std::string subject;         // tower spec id or enemy variant id
  int entity = -1;             // tower id or enemy spawn index
  std::int64_t amount = 0;     // gold moved (cost, refund, bounty) or health lost
  std::int64_t points = 0;     // KILLED
  int level = 0;               // UPGRADED: new level on the track
  std::string detail;          // track name, route id, phase or outcome name

  bool operator==(const SimEvent&) const = default;
};

using Events = std::vector<SimEvent>;

struct TowerStats {
  double range = 0.0;
  double damage = 0.0;
  double firerate = 0.0;
};

// ---- operations -----------------------------------------------------------

/// Builds the opening state of (level, round). Throws std::out_of_range on bad indices.
GameState init_game(std::shared_ptr<const SessionConfig> config, int level_index, int round_index);

/// Validates and applies one player command. On error the state is left untouched.
Expected<Events, CommandError> apply_command(GameState& state, const Command& cmd);

/// Advances the planning countdown by one tick. Throws std::logic_error outside PLANNING.
Events planning_tick(GameState& state);

/// Advances the attack simulation by one tick. Throws std::logic_error outside ATTACK.
Events tick(GameState& state);

/// Index into state.enemies of the tower's target, or nullopt.
std::optional<std::size_t> select_target(const GameState& state, const TowerInstance& tower);

TowerStats effective_stats(const GameState& state, const TowerInstance& tower);

/// Damage multiplier SNIPER applies against an enemy moving at `enemy_speed`.
double sniper_factor(const EffectParams& params, double enemy_speed);

/// Upgrade price for the tower's next level on `track`, with the best in-range discount.
std::int64_t upgrade_cost(const GameState& state, const TowerInstance& tower, UpgradeTrack track);
std::int64_t undiscounted_upgrade_cost(const TowerSpec& spec, int current_level);
/// Smallest DISCOUNT multiplier covering the tower (1.0 when none).
double discount_multiplier(const GameState& state, const TowerInstance& tower);

/// Throws std::logic_error while the round is ONGOING.
double compute_score(const GameState& state, const ScoreWeights& weights);

/// Scripted variant sequence of a spawn point. Throws std::out_of_range on unknown id.
std::vector<std::string> spawn_preview(const GameState& state, std::string_view spawn_point_id);

enum class SelectionVerdict : std::uint8_t { Correct, Incorrect };

/// Ends an OBJECT_SELECTION round. Throws std::logic_error in any other mode.
SelectionVerdict evaluate_selection(GameState& state, int selected_tower_id, int target_tower_id);

/// Fraction of reference items matched by a player-placed tower in cell, spec and orientation.
/// Throws std::logic_error outside OBJECT_MANIPULATION.
double evaluate_layout(const GameState& state, const std::vector<Placement>& reference);

/// World position (cell-centre units) of an enemy along its route.
struct Point {
  double x = 0.0;
  double y = 0.0;
};
Point enemy_position(const GameState& state, const EnemyInstance& e);
double distance(Point a, Point b);
inline Point centre(Cell c) { return {static_cast<double>(c.x), static_cast<double>(c.y)}; }

}  // namespace taskforge
