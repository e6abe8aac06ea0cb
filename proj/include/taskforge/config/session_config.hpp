#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "taskforge/sim/types.hpp"

namespace taskforge {

enum class GameMode : std::uint8_t { TowerDefense, ObjectSelection, ObjectManipulation };
enum class MoneyModel : std::uint8_t { Shared, Individual };
enum class SellPolicy : std::uint8_t { Anyone, OwnerOnly };
enum class AgentKind : std::uint8_t { Human, Ai };

std::string_view to_string(GameMode m);
std::string_view to_string(MoneyModel m);
std::string_view to_string(SellPolicy p);
std::string_view to_string(ScoreMode m);

struct CommFlags {
  bool text_chat = true;
  bool voice = false;
  bool push_to_talk = false;
  bool operator==(const CommFlags&) const = default;
};

struct Visibility {
  bool tower_names = true;
  bool tower_descriptions = true;
  bool coordinate_grid = true;
  bool spawn_preview = true;
  bool operator==(const Visibility&) const = default;
};

struct RefundRates {
  double planning = 1.0;
  double attack = 0.75;
  bool operator==(const RefundRates&) const = default;
};

struct TowerAssignment {
  int slot = 0;
  AgentKind agent = AgentKind::Human;
  std::string color;  // "#rrggbb", unique per slot
  std::vector<std::string> towers;
  bool operator==(const TowerAssignment&) const = default;
};

struct LevelSpec {
  std::string name;
  GridMap map;
  std::int64_t starting_gold = 0;
  std::int64_t starting_health = 1;
  double planning_seconds = 0.0;
  std::optional<std::int64_t> min_win_cost;  // authored annotation, read by the checklist
  std::vector<Placement> preplaced;
  std::vector<Placement> reference_layout;  // OBJECT_MANIPULATION
  std::optional<int> selection_target;      // index into preplaced, OBJECT_SELECTION
  bool operator==(const LevelSpec&) const = default;
};

struct SessionConfig {
  GameMode mode = GameMode::TowerDefense;
  std::vector<LevelSpec> levels;
  int rounds_per_level = 1;
  std::vector<TowerAssignment> team;
  MoneyModel money_model = MoneyModel::Shared;
  SellPolicy sell_policy = SellPolicy::OwnerOnly;
  bool interact_during_attack = false;
  CommFlags comm;
  Visibility visibility;
  ScoreWeights score;
  RefundRates refund;
  std::vector<TowerSpec> tower_catalog;
  std::vector<EnemyVariant> enemy_catalog;
  std::string solution_space_note;
  double intermission_seconds = 5.0;
  bool pause_planning_when_empty = false;

  const TowerSpec* find_tower(std::string_view id) const;
  const EnemyVariant* find_enemy(std::string_view id) const;
  int slot_count() const { return static_cast<int>(team.size()); }

  bool operator==(const SessionConfig&) const = default;
};

}  // namespace taskforge
