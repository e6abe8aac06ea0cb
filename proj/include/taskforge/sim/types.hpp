#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace taskforge {

inline constexpr int kTickRate = 20;
inline constexpr double kTickSeconds = 1.0 / kTickRate;
inline constexpr int kMaxUpgradeLevel = 3;

/// Converts seconds to whole ticks, rounding to nearest.
int seconds_to_ticks(double seconds);

/// Grid coordinate: x is the column from the left, y the row from the top.
struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

std::string to_string(Cell c);  // "(x, y)"

enum class TileKind : std::uint8_t { Buildable, Path, Blocked, Base };

struct PathRoute {
  std::string id;
  std::vector<Cell> waypoints;

  int total_length() const {
    return waypoints.empty() ? 0 : static_cast<int>(waypoints.size()) - 1;
  }
  bool operator==(const PathRoute&) const = default;
};

struct SpawnEntry {
  std::string variant_id;
  double spawn_time = 0.0;  // seconds from attack start
  bool operator==(const SpawnEntry&) const = default;
};

struct SpawnScript {
  std::string id;
  std::string route_id;
  std::vector<SpawnEntry> entries;
  bool operator==(const SpawnScript&) const = default;
};

struct GridMap {
  int width = 0;
  int height = 0;
  std::vector<TileKind> tiles;  // row-major, size width * height
  std::vector<PathRoute> routes;
  std::vector<SpawnScript> spawn_points;
  Cell base_cell;

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  TileKind at(Cell c) const { return tiles[static_cast<std::size_t>(c.y * width + c.x)]; }
  void set(Cell c, TileKind k) { tiles[static_cast<std::size_t>(c.y * width + c.x)] = k; }
  const PathRoute* find_route(std::string_view id) const;
  const SpawnScript* find_spawn(std::string_view id) const;
  int count(TileKind k) const;

  bool operator==(const GridMap&) const = default;
};

struct EnemyVariant {
  std::string id;
  double max_health = 1.0;
  double speed = 1.0;  // tiles per second
  std::int64_t points = 1;
  std::int64_t bounty = 1;
  bool operator==(const EnemyVariant&) const = default;
};

enum class Archetype : std::uint8_t {
  Basic,
  Poison,
  Piercing,
  Splash,
  Obstacle,
  Slow,
  Fear,
  Sniper,
  Discount,
  Support,
  Multishot,
  Map,
};

inline constexpr std::array<Archetype, 12> kAllArchetypes = {
    Archetype::Basic,  Archetype::Poison,   Archetype::Piercing, Archetype::Splash,
    Archetype::Obstacle, Archetype::Slow,   Archetype::Fear,     Archetype::Sniper,
    Archetype::Discount, Archetype::Support, Archetype::Multishot, Archetype::Map,
};

std::string_view to_string(Archetype a);
std::optional<Archetype> parse_archetype(std::string_view s);

/// True for archetypes that shoot (everything except DISCOUNT and SUPPORT).
inline bool attacks(Archetype a) { return a != Archetype::Discount && a != Archetype::Support; }

/// Archetype-specific tuning. Only the fields relevant to a tower's archetype are read.
struct EffectParams {
  double poison_dps = 5.0;
  double poison_duration = 3.0;
  double splash_radius = 1.5;
  double slow_multiplier = 0.5;
  double slow_duration = 2.0;
  double fear_multiplier = 1.0;
  double fear_duration = 1.5;
  double fear_immunity = 5.0;
  double sniper_reference_speed = 1.0;
  double sniper_cap = 3.0;
  int trap_charges = 10;
  double trap_recharge = 10.0;
  double discount_multiplier = 0.8;
  double support_buff = 0.2;
  double ray_half_width = 0.5;  // PIERCING and MULTISHOT ray thickness
  bool operator==(const EffectParams&) const = default;
};

struct TowerSpec {
  std::string id;
  Archetype archetype = Archetype::Basic;
  std::int64_t cost = 0;
  std::int64_t upgrade_cost = 0;  // base cost of the first upgrade on any track
  double range = 0.0;
  double damage = 0.0;
  double firerate = 1.0;
  EffectParams effects;
  std::string display_name;
  std::string description;
  bool operator==(const TowerSpec&) const = default;
};

enum class UpgradeTrack : std::uint8_t { Range = 0, Damage = 1, Firerate = 2 };
std::string_view to_string(UpgradeTrack t);
std::optional<UpgradeTrack> parse_track(std::string_view s);

/// A tower placed by the level author, or an item of a reference layout.
struct Placement {
  std::string spec_id;
  Cell cell;
  int orientation = 0;  // quarter turns, 0..3
  bool operator==(const Placement&) const = default;
};

enum class ScoreMode : std::uint8_t { Binary, Linear };

struct ScoreWeights {
  ScoreMode mode = ScoreMode::Binary;
  double w_unspent = 0.0;
  double w_points = 0.0;
  double w_health = 0.0;
  bool operator==(const ScoreWeights&) const = default;
};

}  // namespace taskforge
