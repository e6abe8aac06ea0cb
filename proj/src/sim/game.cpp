#include "taskforge/sim/game.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sim_internal.hpp"

namespace taskforge {

std::int64_t GameState::total_money() const {
  return std::accumulate(money.begin(), money.end(), std::int64_t{0});
}

const TowerInstance* GameState::tower_at(Cell c) const {
  for (const auto& t : towers) {
    if (t.cell == c) return &t;
  }
  return nullptr;
}

const TowerInstance* GameState::find_tower(int id) const {
  for (const auto& t : towers) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

const TowerSpec& GameState::spec_of(const TowerInstance& t) const {
  return config->tower_catalog[static_cast<std::size_t>(t.spec_index)];
}

const EnemyVariant& GameState::variant_of(const EnemyInstance& e) const {
  return config->enemy_catalog[static_cast<std::size_t>(e.variant_index)];
}

const PathRoute& GameState::route_of(const EnemyInstance& e) const {
  return map().routes[static_cast<std::size_t>(e.route_index)];
}

const EffectState* EnemyInstance::effect(EffectKind k) const {
  for (const auto& e : effects) {
    if (e.kind == k) return &e;
  }
  return nullptr;
}

namespace detail {

int spec_index(const SessionConfig& cfg, std::string_view id) {
  for (std::size_t i = 0; i < cfg.tower_catalog.size(); ++i) {
    if (cfg.tower_catalog[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

std::size_t pool_index(const GameState& s, int slot) {
  if (s.config->money_model == MoneyModel::Shared) return 0;
  return static_cast<std::size_t>(slot);
}

void credit_bounty(GameState& s, std::int64_t bounty) {
  s.ledger.bounties += bounty;
  if (s.money.size() == 1) {
    s.money[0] += bounty;
    return;
  }
  std::vector<std::size_t> slots;
  for (std::size_t i = 0; i < s.money.size(); ++i) {
    if (i < s.participating.size() && s.participating[i]) slots.push_back(i);
  }
  if (slots.empty()) {
    for (std::size_t i = 0; i < s.money.size(); ++i) slots.push_back(i);
  }
  const auto n = static_cast<std::int64_t>(slots.size());
  const std::int64_t share = bounty / n;
  std::int64_t remainder = bounty % n;
  for (auto slot : slots) {
    s.money[slot] += share + (remainder > 0 ? 1 : 0);
    if (remainder > 0) --remainder;
  }
}

void place_trap(GameState& s, TowerInstance& t) {
  const auto& spec = s.spec_of(t);
  const auto& map = s.map();
  std::optional<Cell> best;
  double best_dist = 0.0;
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      const Cell c{x, y};
      if (map.at(c) != TileKind::Path) continue;
      const double d = distance(centre(c), centre(t.cell));
      if (d > spec.range + kEps) continue;
      bool taken = false;
      for (const auto& other : s.towers) {
        if (other.id != t.id && other.trap_cell && *other.trap_cell == c) taken = true;
      }
      if (taken) continue;
      // row-major scan order breaks distance ties by (y, x)
      if (!best || d < best_dist - kEps) {
        best = c;
        best_dist = d;
      }
    }
  }
  t.trap_cell = best;
  t.trap_charges = best ? spec.effects.trap_charges : 0;
}

void end_round(GameState& s, Outcome outcome, Events& out) {
  s.outcome = outcome;
  s.phase = Phase::Ended;
  SimEvent ended{.kind = EventKind::RoundEnded, .tick = s.tick};
  ended.detail = std::string(to_string(outcome));
  out.push_back(ended);
  SimEvent changed{.kind = EventKind::PhaseChanged, .tick = s.tick};
  changed.detail = std::string(to_string(Phase::Ended));
  out.push_back(changed);
}

void end_planning(GameState& s, Events& out) {
  s.planning_ticks_remaining = 0;
  switch (s.config->mode) {
    case GameMode::TowerDefense: {
      s.phase = Phase::Attack;
      SimEvent changed{.kind = EventKind::PhaseChanged, .tick = s.tick};
      changed.detail = std::string(to_string(Phase::Attack));
      out.push_back(changed);
      break;
    }
    case GameMode::ObjectSelection:
      end_round(s, Outcome::Lose, out);
      break;
    case GameMode::ObjectManipulation: {
      const double score = evaluate_layout(s, s.level().reference_layout);
      s.layout_score = score;
      end_round(s, score >= 1.0 - kEps ? Outcome::Win : Outcome::Lose, out);
      break;
    }
  }
}

}  // namespace detail

using namespace detail;

GameState init_game(std::shared_ptr<const SessionConfig> config, int level_index, int round_index) {
  if (!config) throw std::invalid_argument("init_game: null config");
  if (level_index < 0 || level_index >= static_cast<int>(config->levels.size())) {
    throw std::out_of_range("init_game: level index out of range");
  }
  if (round_index < 0 || round_index >= config->rounds_per_level) {
    throw std::out_of_range("init_game: round index out of range");
  }
  GameState s;
  s.config = std::move(config);
  s.level_index = level_index;
  s.round_index = round_index;
  const auto& cfg = *s.config;
  const auto& level = s.level();

  const int slots = std::max(1, cfg.slot_count());
  const std::size_t pools = cfg.money_model == MoneyModel::Shared ? 1 : static_cast<std::size_t>(slots);
  s.money.assign(pools, level.starting_gold);
  s.ledger.starting_gold = level.starting_gold * static_cast<std::int64_t>(pools);
  s.health = level.starting_health;
  s.ready.assign(static_cast<std::size_t>(slots), false);
  s.participating.assign(static_cast<std::size_t>(slots), true);

  for (const auto& p : level.preplaced) {
    TowerInstance t;
    t.id = s.next_tower_id++;
    t.spec_id = p.spec_id;
    t.spec_index = spec_index(cfg, p.spec_id);
    if (t.spec_index < 0) throw std::invalid_argument("init_game: unknown pre-placed tower " + p.spec_id);
    t.owner = -1;
    t.cell = p.cell;
    t.orientation = p.orientation;
    s.towers.push_back(t);
    if (s.spec_of(s.towers.back()).archetype == Archetype::Obstacle) place_trap(s, s.towers.back());
  }

  for (const auto& script : level.map.spawn_points) {
    for (const auto& entry : script.entries) {
      s.pending_spawns.push_back({seconds_to_ticks(entry.spawn_time), entry.variant_id, script.route_id});
    }
  }
  std::stable_sort(s.pending_spawns.begin(), s.pending_spawns.end(),
                   [](const PendingSpawn& a, const PendingSpawn& b) { return a.spawn_tick < b.spawn_tick; });

  s.planning_ticks_remaining = seconds_to_ticks(level.planning_seconds);
  if (s.planning_ticks_remaining <= 0 && cfg.mode == GameMode::TowerDefense) {
    s.planning_ticks_remaining = 0;
    s.phase = Phase::Attack;
  }
  return s;
}

namespace {

bool phase_allows(const GameState& s, CommandKind kind) {
  if (s.phase == Phase::Ended) return false;
  switch (kind) {
    case CommandKind::Ready:
      return s.phase == Phase::Planning;
    case CommandKind::Select:
      return s.config->mode == GameMode::ObjectSelection && s.phase == Phase::Planning;
    case CommandKind::Place:
    case CommandKind::Sell:
    case CommandKind::Upgrade:
      return s.phase == Phase::Planning || s.config->interact_during_attack;
  }
  return false;
}

bool assigned(const SessionConfig& cfg, int slot, std::string_view spec_id) {
  for (const auto& a : cfg.team) {
    if (a.slot != slot) continue;
    return std::find(a.towers.begin(), a.towers.end(), spec_id) != a.towers.end();
  }
  return false;
}

TowerInstance* mutable_tower_at(GameState& s, Cell c) {
  for (auto& t : s.towers) {
    if (t.cell == c) return &t;
  }
  return nullptr;
}

Expected<Events, CommandError> place(GameState& s, const Command& cmd) {
  const auto& cfg = *s.config;
  if (cmd.spec_id.empty() || !cmd.cell || cmd.orientation < 0 || cmd.orientation > 3) {
    return unexpected(CommandError::InvalidPayload);
  }
  const int idx = spec_index(cfg, cmd.spec_id);
  if (idx < 0) return unexpected(CommandError::UnknownSpec);
  if (!assigned(cfg, cmd.issuer, cmd.spec_id)) return unexpected(CommandError::SpecNotAssigned);
  const Cell cell = *cmd.cell;
  const auto& map = s.map();
  if (!map.in_bounds(cell) || map.at(cell) != TileKind::Buildable) {
    return unexpected(CommandError::CellNotBuildable);
  }
  if (s.tower_at(cell)) return unexpected(CommandError::CellOccupied);
  const auto& spec = cfg.tower_catalog[static_cast<std::size_t>(idx)];
  auto& pool = s.money[pool_index(s, cmd.issuer)];
  if (pool < spec.cost) return unexpected(CommandError::InsufficientFunds);

  pool -= spec.cost;
  s.ledger.purchases += spec.cost;
  TowerInstance t;
  t.id = s.next_tower_id++;
  t.spec_id = spec.id;
  t.spec_index = idx;
  t.owner = cmd.issuer;
  t.cell = cell;
  t.orientation = cmd.orientation;
  t.total_spent = spec.cost;
  s.towers.push_back(t);
  if (spec.archetype == Archetype::Obstacle) place_trap(s, s.towers.back());

  SimEvent e{.kind = EventKind::Placed, .tick = s.tick, .actor = cmd.issuer, .cell = cell};
  e.subject = spec.id;
  e.entity = t.id;
  e.amount = spec.cost;
  return Events{e};
}

Expected<Events, CommandError> sell(GameState& s, const Command& cmd) {
  if (!cmd.cell) return unexpected(CommandError::InvalidPayload);
  auto it = std::find_if(s.towers.begin(), s.towers.end(),
                         [&](const TowerInstance& t) { return t.cell == *cmd.cell; });
  if (it == s.towers.end()) return unexpected(CommandError::UnknownTower);
  if (it->owner < 0) return unexpected(CommandError::NotOwner);
  if (s.config->sell_policy == SellPolicy::OwnerOnly && it->owner != cmd.issuer) {
    return unexpected(CommandError::NotOwner);
  }
  const double rate = s.phase == Phase::Planning ? s.config->refund.planning : s.config->refund.attack;
  const auto refund = static_cast<std::int64_t>(std::floor(rate * static_cast<double>(it->total_spent) + kEps));
  s.money[pool_index(s, cmd.issuer)] += refund;
  s.ledger.refunds += refund;

  SimEvent e{.kind = EventKind::Sold, .tick = s.tick, .actor = cmd.issuer, .cell = it->cell};
  e.subject = it->spec_id;
  e.entity = it->id;
  e.amount = refund;
  s.towers.erase(it);
  return Events{e};
}

Expected<Events, CommandError> upgrade(GameState& s, const Command& cmd) {
  if (!cmd.cell || !cmd.track) return unexpected(CommandError::InvalidPayload);
  TowerInstance* t = mutable_tower_at(s, *cmd.cell);
  if (!t) return unexpected(CommandError::UnknownTower);
  const auto track = *cmd.track;
  if (t->level(track) >= kMaxUpgradeLevel) return unexpected(CommandError::MaxUpgradeLevel);
  const std::int64_t cost = upgrade_cost(s, *t, track);
  auto& pool = s.money[pool_index(s, cmd.issuer)];
  if (pool < cost) return unexpected(CommandError::InsufficientFunds);

  pool -= cost;
  s.ledger.purchases += cost;
  t->total_spent += cost;
  const int new_level = ++t->levels[static_cast<std::size_t>(track)];

  SimEvent e{.kind = EventKind::Upgraded, .tick = s.tick, .actor = cmd.issuer, .cell = t->cell};
  e.subject = t->spec_id;
  e.entity = t->id;
  e.amount = cost;
  e.level = new_level;
  e.detail = std::string(to_string(track));
  return Events{e};
}

Expected<Events, CommandError> ready(GameState& s, const Command& cmd) {
  s.ready[static_cast<std::size_t>(cmd.issuer)] = cmd.ready;
  Events out;
  bool all = true;
  for (std::size_t i = 0; i < s.ready.size(); ++i) {
    if (s.participating[i] && !s.ready[i]) all = false;
  }
  if (all) end_planning(s, out);
  return out;
}

Expected<Events, CommandError> select(GameState& s, const Command& cmd) {
  const TowerInstance* chosen = nullptr;
  if (cmd.tower_id) {
    chosen = s.find_tower(*cmd.tower_id);
  } else if (cmd.cell) {
    chosen = s.tower_at(*cmd.cell);
  } else {
    return unexpected(CommandError::InvalidPayload);
  }
  if (!chosen) return unexpected(CommandError::UnknownTower);
  const auto& target = s.level().selection_target;
  const int target_id = target ? *target : -1;
  const int chosen_id = chosen->id;
  evaluate_selection(s, chosen_id, target_id);
  Events out;
  SimEvent ended{.kind = EventKind::RoundEnded, .tick = s.tick, .actor = cmd.issuer, .cell = chosen->cell};
  ended.entity = chosen_id;
  ended.detail = std::string(to_string(s.outcome));
  out.push_back(ended);
  SimEvent changed{.kind = EventKind::PhaseChanged, .tick = s.tick};
  changed.detail = std::string(to_string(Phase::Ended));
  out.push_back(changed);
  return out;
}

}  // namespace

Expected<Events, CommandError> apply_command(GameState& state, const Command& cmd) {
  if (cmd.issuer < 0 || cmd.issuer >= static_cast<int>(state.ready.size())) {
    return unexpected(CommandError::InvalidPayload);
  }
  if (!phase_allows(state, cmd.kind)) return unexpected(CommandError::PhaseViolation);
  switch (cmd.kind) {
    case CommandKind::Place: return place(state, cmd);
    case CommandKind::Sell: return sell(state, cmd);
    case CommandKind::Upgrade: return upgrade(state, cmd);
    case CommandKind::Ready: return ready(state, cmd);
    case CommandKind::Select: return select(state, cmd);
  }
  return unexpected(CommandError::InvalidPayload);
}

Events planning_tick(GameState& state) {
  if (state.phase != Phase::Planning) throw std::logic_error("planning_tick called outside PLANNING");
  Events out;
  if (state.planning_ticks_remaining > 0) --state.planning_ticks_remaining;
  if (state.planning_ticks_remaining == 0) end_planning(state, out);
  return out;
}

// ---- economy helpers ------------------------------------------------------

std::int64_t undiscounted_upgrade_cost(const TowerSpec& spec, int current_level) {
  return spec.upgrade_cost * (std::int64_t{1} << current_level);
}

double discount_multiplier(const GameState& state, const TowerInstance& tower) {
  double best = 1.0;
  for (const auto& other : state.towers) {
    if (other.id == tower.id) continue;
    const auto& spec = state.spec_of(other);
    if (spec.archetype != Archetype::Discount) continue;
    const double reach = spec.range * std::pow(kRangeStep, other.level(UpgradeTrack::Range));
    if (distance(centre(other.cell), centre(tower.cell)) <= reach + kEps) {
      best = std::min(best, spec.effects.discount_multiplier);
    }
  }
  return best;
}

std::int64_t upgrade_cost(const GameState& state, const TowerInstance& tower, UpgradeTrack track) {
  const auto base = undiscounted_upgrade_cost(state.spec_of(tower), tower.level(track));
  const double mult = discount_multiplier(state, tower);
  if (mult >= 1.0) return base;
  return std::llround(static_cast<double>(base) * mult);
}

TowerStats effective_stats(const GameState& state, const TowerInstance& tower) {
  const auto& spec = state.spec_of(tower);
  double buff = 0.0;
  for (const auto& other : state.towers) {
    if (other.id == tower.id) continue;
    const auto& ospec = state.spec_of(other);
    if (ospec.archetype != Archetype::Support) continue;
    const double reach = ospec.range * std::pow(kRangeStep, other.level(UpgradeTrack::Range));
    if (distance(centre(other.cell), centre(tower.cell)) <= reach + kEps) {
      buff = std::max(buff, ospec.effects.support_buff);
    }
  }
  const double factor = 1.0 + buff;
  return TowerStats{
      .range = spec.range * std::pow(kRangeStep, tower.level(UpgradeTrack::Range)) * factor,
      .damage = spec.damage * std::pow(kDamageStep, tower.level(UpgradeTrack::Damage)) * factor,
      .firerate = spec.firerate * std::pow(kFirerateStep, tower.level(UpgradeTrack::Firerate)) * factor,
  };
}

double sniper_factor(const EffectParams& params, double enemy_speed) {
  return std::clamp(enemy_speed / params.sniper_reference_speed, 1.0, params.sniper_cap);
}

double compute_score(const GameState& state, const ScoreWeights& weights) {
  if (state.outcome == Outcome::Ongoing) throw std::logic_error("compute_score: round still ongoing");
  if (weights.mode == ScoreMode::Binary) return state.outcome == Outcome::Win ? 1.0 : 0.0;
  return weights.w_unspent * static_cast<double>(state.total_money()) +
         weights.w_points * static_cast<double>(state.kill_points) +
         weights.w_health * static_cast<double>(state.health);
}

std::vector<std::string> spawn_preview(const GameState& state, std::string_view spawn_point_id) {
  const auto* script = state.map().find_spawn(spawn_point_id);
  if (!script) throw std::out_of_range("spawn_preview: unknown spawn point " + std::string(spawn_point_id));
  std::vector<std::size_t> order(script->entries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return script->entries[a].spawn_time < script->entries[b].spawn_time;
  });
  std::vector<std::string> out;
  out.reserve(order.size());
  for (auto i : order) out.push_back(script->entries[i].variant_id);
  return out;
}

SelectionVerdict evaluate_selection(GameState& state, int selected_tower_id, int target_tower_id) {
  if (state.config->mode != GameMode::ObjectSelection) {
    throw std::logic_error("evaluate_selection: not an OBJECT_SELECTION session");
  }
  const bool correct = selected_tower_id == target_tower_id;
  state.selected_tower = selected_tower_id;
  state.outcome = correct ? Outcome::Win : Outcome::Lose;
  state.phase = Phase::Ended;
  state.planning_ticks_remaining = 0;
  return correct ? SelectionVerdict::Correct : SelectionVerdict::Incorrect;
}

double evaluate_layout(const GameState& state, const std::vector<Placement>& reference) {
  if (state.config->mode != GameMode::ObjectManipulation) {
    throw std::logic_error("evaluate_layout: not an OBJECT_MANIPULATION session");
  }
  if (reference.empty()) return 0.0;
  // At most one tower per cell, so each reference item has at most one candidate.
  int matched = 0;
  for (const auto& item : reference) {
    const auto* t = state.tower_at(item.cell);
    if (t && t->owner >= 0 && t->spec_id == item.spec_id && t->orientation == item.orientation) ++matched;
  }
  return static_cast<double>(matched) / static_cast<double>(reference.size());
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Point enemy_position(const GameState& state, const EnemyInstance& e) {
  const auto& wp = state.route_of(e).waypoints;
  const int len = static_cast<int>(wp.size()) - 1;
  if (len <= 0) return centre(wp.front());
  const double p = std::clamp(e.progress, 0.0, static_cast<double>(len));
  const int i = std::min(static_cast<int>(std::floor(p)), len - 1);
  const double f = p - i;
  const auto a = centre(wp[static_cast<std::size_t>(i)]);
  const auto b = centre(wp[static_cast<std::size_t>(i) + 1]);
  return {a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f};
}

}  // namespace taskforge
