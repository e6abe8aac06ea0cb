#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "taskforge/config/session_config.hpp"
#include "taskforge/util/expected.hpp"

namespace taskforge {

/// A problem found while reading a configuration document.
struct ParseIssue {
  std::string path;     // e.g. "levels[0].map.grid[3]"; empty for syntax errors
  std::string message;
  int line = 0;         // 1-based; 0 when not applicable
  int column = 0;

  std::string to_string() const;
};

using ParseIssues = std::vector<ParseIssue>;

/// Reads a configuration document. Checks syntax, field names and types only.
Expected<SessionConfig, ParseIssues> parse_config(std::string_view text);

/// Canonical document for `config`; parse_config(serialize_config(c)) == c.
std::string serialize_config(const SessionConfig& config);

/// Validation error codes. Stable and versioned: append only.
enum class ConfigError {
  NoLevels,              // E001
  BadRounds,             // E002
  BadTeamSize,           // E003
  MapTooSmall,           // E004
  TileCountMismatch,     // E005
  BaseNotOnBase,         // E006
  RouteTooShort,         // E007
  RouteOutOfBounds,      // E008
  RouteNotAdjacent,      // E009
  RouteNotOnPath,        // E010
  RouteNotAtBase,        // E011
  SpawnUnknownRoute,     // E012
  SpawnNotOnRouteHead,   // E013
  SpawnUnknownEnemy,     // E014
  SpawnTimesDecreasing,  // E015
  DuplicateId,           // E016
  BadEnemyStats,         // E017
  BadTowerStats,         // E018
  AssignmentUnknownTower,  // E019
  DuplicateColor,        // E020
  BadSlotIds,            // E021
  NegativeGold,          // E022
  BadHealth,             // E023
  NegativePlanning,      // E024
  PreplacedUnknownTower, // E025
  PreplacedBadCell,      // E026
  SelectionTargetMissing,  // E027
  ReferenceLayoutMissing,  // E028
  NoBuildableArea,       // E029
  PreplacedMissing,      // E030
  BadScoreWeights,       // E031
  BadRefundRate,         // E032
  BadOrientation,        // E033
  ObjectModePlanning,    // E034
  SpawnHeadShared,       // E035
};

std::string_view code(ConfigError e);     // "E009"
std::string_view message(ConfigError e); // "route not 4-adjacent"

struct ValidationIssue {
  ConfigError error;
  std::string path;
  std::string to_string() const;
};

/// Empty result means the config is valid.
std::vector<ValidationIssue> validate_config(const SessionConfig& config);

struct ChecklistAnswers {
  std::string q1;   // success evaluation
  std::string q2;   // instance duration
  std::string q3;   // repetition and difficulty scaling
  std::string q4;   // human / AI composition
  std::string q5;   // role symmetry
  std::string q6;   // interdependence
  std::string q7;   // solution space (authored)
  std::string q8;   // information distribution
  std::string q9;   // stress
  std::string q10;  // communication medium

  bool operator==(const ChecklistAnswers&) const = default;
};

ChecklistAnswers checklist_report(const SessionConfig& config);

/// Upper estimate of the attack phase: latest spawn plus that enemy's traversal time.
double scripted_attack_seconds(const SessionConfig& config, const LevelSpec& level);

std::vector<std::string> preset_names();
/// Throws std::invalid_argument for an unknown name.
SessionConfig builtin_preset(std::string_view name);

}  // namespace taskforge
