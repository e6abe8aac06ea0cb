#include <gtest/gtest.h>

#include <algorithm>
#include <memory>
#include <nlohmann/json.hpp>
#include <random>
#include <set>

#include "support/scenarios.hpp"
#include "taskforge/config/config.hpp"
#include "taskforge/sim/autoplay.hpp"
#include "taskforge/sim/game.hpp"

using namespace taskforge;

namespace {

bool has_error(const std::vector<ValidationIssue>& issues, ConfigError e) {
  return std::any_of(issues.begin(), issues.end(), [&](const auto& i) { return i.error == e; });
}

std::string dump(const std::vector<ValidationIssue>& issues) {
  std::string out;
  for (const auto& i : issues) out += i.to_string() + "\n";
  return out;
}

}  // namespace

TEST(Presets, AllValidate) {
  for (const auto& name : preset_names()) {
    const auto issues = validate_config(builtin_preset(name));
    EXPECT_TRUE(issues.empty()) << name << "\n" << dump(issues);
  }
}

TEST(Presets, UnknownNameThrows) { EXPECT_THROW(builtin_preset("case-study-9"), std::invalid_argument); }

TEST(Presets, CaseStudyShape) {
  const auto c = builtin_preset("case-study");
  ASSERT_EQ(c.levels.size(), 3u);
  EXPECT_EQ(c.rounds_per_level, 3);
  EXPECT_EQ(c.money_model, MoneyModel::Shared);
  EXPECT_FALSE(c.interact_during_attack);
  EXPECT_TRUE(c.comm.text_chat);
  EXPECT_FALSE(c.comm.voice);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(c.levels[k].map.spawn_points.size(), k + 1);
  for (std::size_t k = 1; k < 3; ++k) {
    EXPECT_GT(c.levels[k].map.spawn_points.size(), c.levels[k - 1].map.spawn_points.size());
    EXPECT_LE(c.levels[k].map.count(TileKind::Buildable), c.levels[k - 1].map.count(TileKind::Buildable));
  }
  // 12-tower pool, 2-4 unique towers per player
  EXPECT_EQ(c.tower_catalog.size(), 12u);
  std::set<std::string> seen;
  for (const auto& a : c.team) {
    EXPECT_GE(a.towers.size(), 2u);
    EXPECT_LE(a.towers.size(), 4u);
    for (const auto& t : a.towers) EXPECT_TRUE(seen.insert(t).second) << t;
  }
}

TEST(Presets, TutorialIsMinimal) {
  const auto c = builtin_preset("tutorial");
  ASSERT_EQ(c.levels.size(), 1u);
  EXPECT_EQ(c.levels[0].map.spawn_points.size(), 1u);
}

TEST(Presets, ObjectSelectionHasOneTarget) {
  const auto c = builtin_preset("object-selection");
  EXPECT_EQ(c.mode, GameMode::ObjectSelection);
  ASSERT_EQ(c.levels.size(), 1u);
  ASSERT_TRUE(c.levels[0].selection_target.has_value());
  EXPECT_LT(*c.levels[0].selection_target, static_cast<int>(c.levels[0].preplaced.size()));
  EXPECT_NE(checklist_report(c).q2.find("planning only"), std::string::npos);
}

TEST(Presets, UpgradesSlightlyFavoredOverNewTowers) {
  for (const auto& t : builtin_preset("case-study").tower_catalog) {
    if (t.damage <= 0.0) continue;
    const double new_tower = t.damage / static_cast<double>(t.cost);
    const double first_upgrade = 0.5 * t.damage / static_cast<double>(t.upgrade_cost);
    EXPECT_GT(first_upgrade, new_tower) << t.id;
    EXPECT_LT(first_upgrade, 1.25 * new_tower) << t.id;
  }
}

TEST(Presets, CaseStudyIsWinnableWithSurplusGold) {
  auto cfg = std::make_shared<const SessionConfig>(builtin_preset("case-study"));
  for (int level = 0; level < 3; ++level) {
    for (int round = 0; round < 3; ++round) {
      auto s = init_game(cfg, level, round);
      for (const auto& c : scripted_plan(s)) ASSERT_TRUE(apply_command(s, c).has_value());
      run_to_end(s);
      EXPECT_EQ(s.outcome, Outcome::Win) << level << "/" << round;
      EXPECT_GT(s.total_money(), s.level().starting_gold / 2);
    }
  }
}

TEST(Parse, PresetsRoundTrip) {
  for (const auto& name : preset_names()) {
    const auto c = builtin_preset(name);
    const auto text = serialize_config(c);
    auto back = parse_config(text);
    ASSERT_TRUE(back.has_value()) << name << ": " << back.error().front().to_string();
    EXPECT_TRUE(*back == c) << name;
    EXPECT_EQ(serialize_config(*back), text);
  }
}

TEST(Parse, RandomConfigsRoundTrip) {
  std::mt19937_64 rng(20240601);
  for (int i = 0; i < 100; ++i) {
    const auto c = taskforge::testkit::random_config(rng);
    const auto issues = validate_config(c);
    ASSERT_TRUE(issues.empty()) << "config " << i << "\n" << dump(issues);
    auto back = parse_config(serialize_config(c));
    ASSERT_TRUE(back.has_value()) << "config " << i << ": " << back.error().front().to_string();
    EXPECT_TRUE(*back == c) << "config " << i;
  }
}

TEST(Parse, MissingLevelsNamesTheField) {
  auto doc = nlohmann::ordered_json::parse(serialize_config(builtin_preset("tutorial")));
  doc.erase("levels");
  auto r = parse_config(doc.dump(2));
  ASSERT_FALSE(r.has_value());
  EXPECT_EQ(r.error().front().path, "levels");
  EXPECT_NE(r.error().front().to_string().find("levels"), std::string::npos);
}

TEST(Parse, SyntaxErrorHasLineAndColumn) {
  auto r = parse_config("{\n  \"mode\": \"TOWER_DEFENSE\",\n  \"levels\": [,]\n}");
  ASSERT_FALSE(r.has_value());
  EXPECT_EQ(r.error().front().line, 3);
  EXPECT_GT(r.error().front().column, 1);
}

TEST(Parse, UnknownFieldAndTypeMismatch) {
  auto doc = nlohmann::ordered_json::parse(serialize_config(builtin_preset("tutorial")));
  doc["colour"] = "red";
  auto r = parse_config(doc.dump());
  ASSERT_FALSE(r.has_value());
  EXPECT_EQ(r.error().front().path, "colour");

  doc.erase("colour");
  doc["rounds_per_level"] = "three";
  r = parse_config(doc.dump());
  ASSERT_FALSE(r.has_value());
  EXPECT_EQ(r.error().front().path, "rounds_per_level");
}

TEST(Validate, DiagonalRouteStep) {
  auto c = builtin_preset("tutorial");
  auto& route = c.levels[0].map.routes[0].waypoints;
  route.insert(route.begin() + 1, Cell{1, 4});
  route.erase(route.begin() + 2);
  const auto issues = validate_config(c);
  ASSERT_TRUE(has_error(issues, ConfigError::RouteNotAdjacent)) << dump(issues);
  EXPECT_EQ(message(ConfigError::RouteNotAdjacent), "route not 4-adjacent");
  EXPECT_EQ(code(ConfigError::RouteNotAdjacent), "E009");
}

TEST(Validate, SelectionTargetMissing) {
  auto c = builtin_preset("object-selection");
  c.levels[0].selection_target.reset();
  const auto issues = validate_config(c);
  ASSERT_TRUE(has_error(issues, ConfigError::SelectionTargetMissing)) << dump(issues);
  EXPECT_EQ(message(ConfigError::SelectionTargetMissing), "selection target missing");
  c.levels[0].selection_target = 9;
  EXPECT_TRUE(has_error(validate_config(c), ConfigError::SelectionTargetMissing));
}

TEST(Validate, ReportsPathOfOffendingItem) {
  auto c = builtin_preset("case-study");
  c.team[2].color = c.team[0].color;
  c.team[1].towers.push_back("LASER");
  const auto issues = validate_config(c);
  ASSERT_TRUE(has_error(issues, ConfigError::DuplicateColor));
  ASSERT_TRUE(has_error(issues, ConfigError::AssignmentUnknownTower));
  for (const auto& i : issues) {
    if (i.error == ConfigError::AssignmentUnknownTower) EXPECT_EQ(i.path, "team[1].towers[3]");
    if (i.error == ConfigError::DuplicateColor) EXPECT_EQ(i.path, "team[2].color");
  }
}

TEST(Validate, OtherRules) {
  auto c = builtin_preset("tutorial");
  c.levels.clear();
  EXPECT_TRUE(has_error(validate_config(c), ConfigError::NoLevels));

  c = builtin_preset("tutorial");
  c.levels[0].map.routes[0].waypoints.pop_back();
  EXPECT_TRUE(has_error(validate_config(c), ConfigError::RouteNotAtBase));

  c = builtin_preset("tutorial");
  c.levels[0].map.spawn_points[0].route_id = "nowhere";
  EXPECT_TRUE(has_error(validate_config(c), ConfigError::SpawnUnknownRoute));

  c = builtin_preset("tutorial");
  for (auto& t : c.levels[0].map.tiles) {
    if (t == TileKind::Buildable) t = TileKind::Blocked;
  }
  EXPECT_TRUE(has_error(validate_config(c), ConfigError::NoBuildableArea));

  c = builtin_preset("object-manipulation");
  c.levels[0].reference_layout.clear();
  EXPECT_TRUE(has_error(validate_config(c), ConfigError::ReferenceLayoutMissing));

  c = builtin_preset("object-selection");
  c.levels[0].preplaced.clear();
  EXPECT_TRUE(has_error(validate_config(c), ConfigError::PreplacedMissing));

  c = builtin_preset("tutorial");
  c.levels[0].starting_gold = -1;
  EXPECT_TRUE(has_error(validate_config(c), ConfigError::NegativeGold));
}

TEST(Validate, ErrorCodesAreDenseAndStable) {
  std::set<std::string> codes;
  for (int i = 0; i <= static_cast<int>(ConfigError::SpawnHeadShared); ++i) {
    const auto e = static_cast<ConfigError>(i);
    char expect[8];
    std::snprintf(expect, sizeof expect, "E%03d", i + 1);
    EXPECT_EQ(code(e), expect);
    EXPECT_FALSE(message(e).empty());
    codes.insert(std::string(code(e)));
  }
  EXPECT_EQ(codes.size(), 35u);
}

TEST(Validate, AcceptedConfigsLoadEverywhere) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 100; ++i) {
    auto c = std::make_shared<const SessionConfig>(taskforge::testkit::random_config(rng));
    ASSERT_TRUE(validate_config(*c).empty());
    for (int l = 0; l < static_cast<int>(c->levels.size()); ++l) {
      for (int r = 0; r < c->rounds_per_level; ++r) EXPECT_NO_THROW(init_game(c, l, r)) << i << " " << l << " " << r;
    }
  }
}

TEST(Checklist, CaseStudyAnswers) {
  const auto a = checklist_report(builtin_preset("case-study"));
  EXPECT_NE(a.q1.find("unspent money"), std::string::npos);
  EXPECT_NE(a.q1.find("kill"), std::string::npos);
  EXPECT_NE(a.q1.find("health"), std::string::npos);
  EXPECT_EQ(a.q4, "H-H-H-H");
  EXPECT_NE(a.q5.find("Asymmetric"), std::string::npos);
  EXPECT_NE(a.q6.find("shared money"), std::string::npos);
  EXPECT_EQ(a.q9, "low/moderate");
  EXPECT_EQ(a.q10, "text");
}

TEST(Checklist, CommunicationMedium) {
  auto c = builtin_preset("tutorial");
  c.comm = {false, true, false};
  EXPECT_EQ(checklist_report(c).q10, "voice");
  c.comm = {true, true, false};
  EXPECT_EQ(checklist_report(c).q10, "text, voice");
  c.comm = {false, false, false};
  EXPECT_EQ(checklist_report(c).q10, "none");
}

TEST(Checklist, StressPresetIsHighStress) {
  const auto c = builtin_preset("stress");
  // both triggers hold: the timer is shorter than the scripted attack and gold is below the minimal-win cost
  EXPECT_LT(c.levels[0].planning_seconds, scripted_attack_seconds(c, c.levels[0]));
  EXPECT_LT(c.levels[0].starting_gold, *c.levels[0].min_win_cost);
  EXPECT_EQ(checklist_report(c).q9, "high stress");
}

TEST(Checklist, EachTriggerAloneRaisesStress) {
  auto c = builtin_preset("tutorial");
  EXPECT_EQ(checklist_report(c).q9, "low/moderate");
  auto gold = c;
  gold.levels[0].min_win_cost = gold.levels[0].starting_gold + 1;
  EXPECT_EQ(checklist_report(gold).q9, "high stress");
  auto timer = c;
  timer.levels[0].planning_seconds = scripted_attack_seconds(c, c.levels[0]) - 0.5;
  EXPECT_EQ(checklist_report(timer).q9, "high stress");
}

TEST(Checklist, ScriptedAttackDurationByHand) {
  // tutorial: last grunt leaves at 8 s and walks 9 tiles at 1 tile/s
  const auto c = builtin_preset("tutorial");
  EXPECT_DOUBLE_EQ(scripted_attack_seconds(c, c.levels[0]), 17.0);
}

TEST(Checklist, DeterministicAndNonEmpty) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto c = taskforge::testkit::random_config(rng);
    const auto a = checklist_report(c);
    EXPECT_TRUE(a == checklist_report(SessionConfig(c)));
    for (const auto* q : {&a.q1, &a.q2, &a.q3, &a.q4, &a.q5, &a.q6, &a.q7, &a.q8, &a.q9, &a.q10}) {
      EXPECT_FALSE(q->empty());
    }
  }
}
