#include "taskforge/sim/autoplay.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace taskforge {

namespace {

int coverage(const GridMap& map, Cell at, double range) {
  int n = 0;
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      const Cell c{x, y};
      if (map.at(c) == TileKind::Path && distance(centre(c), centre(at)) <= range + 1e-9) ++n;
    }
  }
  return n;
}

struct Planner {
  const GameState& state;
  std::set<Cell> taken;
  std::int64_t budget;
  std::vector<Command> out;

  std::optional<Cell> pick(const TowerSpec& spec, int skip) {
    const auto& map = state.map();
    std::vector<std::pair<int, Cell>> ranked;
    for (int y = 0; y < map.height; ++y) {
      for (int x = 0; x < map.width; ++x) {
        const Cell c{x, y};
        if (map.at(c) != TileKind::Buildable || taken.count(c) || state.tower_at(c)) continue;
        const int score = spec.archetype == Archetype::Map ? 0 : coverage(map, c, spec.range);
        ranked.push_back({-score, c});
      }
    }
    if (ranked.empty()) return std::nullopt;
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return ranked[std::min<std::size_t>(static_cast<std::size_t>(skip), ranked.size() - 1)].second;
  }
};

}  // namespace

std::optional<Cell> best_cell(const GameState& state, const TowerSpec& spec, int skip) {
  Planner p{state, {}, 0, {}};
  return p.pick(spec, skip);
}

static void plan_slots(Planner& p, const std::vector<int>& slots) {
  const auto& cfg = *p.state.config;
  struct Built {
    int slot;
    Cell cell;
    const TowerSpec* spec;
  };
  std::vector<Built> built;
  const int skip = p.state.round_index;  // later rounds vary the layout a little
  for (int pass = 0; pass < 2; ++pass) {
    for (int slot : slots) {
      const auto& a = cfg.team[static_cast<std::size_t>(slot)];
      for (const auto& id : a.towers) {
        const auto* spec = cfg.find_tower(id);
        if (!spec || !attacks(spec->archetype) || spec->cost > p.budget) continue;
        if (pass > 0 && spec->archetype == Archetype::Map) continue;
        const auto cell = p.pick(*spec, skip);
        if (!cell) continue;
        p.taken.insert(*cell);
        p.budget -= spec->cost;
        p.out.push_back({.issuer = slot, .kind = CommandKind::Place, .spec_id = id, .cell = *cell});
        built.push_back({slot, *cell, spec});
      }
    }
  }
  for (int level = 0; level < kMaxUpgradeLevel; ++level) {
    for (const auto& b : built) {
      if (b.spec->archetype == Archetype::Obstacle) continue;
      const auto cost = undiscounted_upgrade_cost(*b.spec, level);
      if (cost > p.budget) continue;
      p.budget -= cost;
      p.out.push_back({.issuer = b.slot, .kind = CommandKind::Upgrade, .cell = b.cell, .track = UpgradeTrack::Damage});
    }
  }
  for (int slot : slots) p.out.push_back({.issuer = slot, .kind = CommandKind::Ready});
}

std::vector<Command> scripted_plan(const GameState& state, double reserve) {
  const auto& level = state.level();
  Planner p{state, {}, static_cast<std::int64_t>(static_cast<double>(level.starting_gold) * (1.0 - reserve)), {}};
  std::vector<int> slots;
  for (int i = 0; i < state.config->slot_count(); ++i) slots.push_back(i);
  plan_slots(p, slots);
  return p.out;
}

std::vector<Command> scripted_plan_for(const GameState& state, int slot, double reserve) {
  const auto& cfg = *state.config;
  const auto& level = state.level();
  const auto share = cfg.money_model == MoneyModel::Shared ? std::max(1, cfg.slot_count()) : 1;
  Planner p{state, {}, static_cast<std::int64_t>(static_cast<double>(level.starting_gold) * (1.0 - reserve)) / share, {}};
  // Reserve the cells earlier slots would pick so concurrent bots do not collide.
  for (int other = 0; other < slot; ++other) {
    Planner q{state, p.taken, p.budget, {}};
    plan_slots(q, {other});
    for (const auto& c : q.out) {
      if (c.kind == CommandKind::Place) p.taken.insert(*c.cell);
    }
  }
  plan_slots(p, {slot});
  return p.out;
}

Events run_to_end(GameState& state, long max_ticks) {
  Events all;
  long n = 0;
  while (state.phase != Phase::Ended) {
    if (++n > max_ticks) throw std::runtime_error("run_to_end: tick limit exceeded");
    auto ev = state.phase == Phase::Planning ? planning_tick(state) : tick(state);
    all.insert(all.end(), ev.begin(), ev.end());
  }
  return all;
}

}  // namespace taskforge
