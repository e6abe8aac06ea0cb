// Attack-phase pipeline: spawn, decay, move, poison, fire, reap, leak, end check.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sim_internal.hpp"
#include "taskforge/sim/game.hpp"

namespace taskforge {

using namespace detail;

namespace {

bool alive(const EnemyInstance& e) { return e.health > kEps; }

double slow_multiplier(const EnemyInstance& e) {
  const auto* slow = e.effect(EffectKind::Slow);
  return slow && slow->active ? slow->magnitude : 1.0;
}

bool feared(const EnemyInstance& e) {
  const auto* fear = e.effect(EffectKind::Fear);
  return fear && fear->active;
}

int route_index(const GridMap& map, std::string_view id) {
  for (std::size_t i = 0; i < map.routes.size(); ++i) {
    if (map.routes[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

int variant_index(const SessionConfig& cfg, std::string_view id) {
  for (std::size_t i = 0; i < cfg.enemy_catalog.size(); ++i) {
    if (cfg.enemy_catalog[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

void spawn_due(GameState& s, Events& out) {
  auto it = s.pending_spawns.begin();
  while (it != s.pending_spawns.end() && it->spawn_tick < s.tick) ++it;
  for (auto p = s.pending_spawns.begin(); p != it; ++p) {
    EnemyInstance e;
    e.spawn_index = s.next_spawn_index++;
    e.variant_id = p->variant_id;
    e.variant_index = variant_index(*s.config, p->variant_id);
    e.route_id = p->route_id;
    e.route_index = route_index(s.map(), p->route_id);
    if (e.variant_index < 0 || e.route_index < 0) {
      throw std::logic_error("spawn references unknown variant or route");
    }
    e.health = s.variant_of(e).max_health;
    s.enemies.push_back(std::move(e));
    ++s.ledger.spawned;
    SimEvent ev{.kind = EventKind::Spawned, .tick = s.tick};
    ev.subject = p->variant_id;
    ev.entity = s.enemies.back().spawn_index;
    ev.detail = p->route_id;
    out.push_back(std::move(ev));
  }
  s.pending_spawns.erase(s.pending_spawns.begin(), it);
}

void decay_effects(GameState& s) {
  for (auto& e : s.enemies) {
    for (auto& fx : e.effects) {
      fx.active = fx.remaining_ticks > 0;
      if (fx.remaining_ticks > 0) {
        --fx.remaining_ticks;
      } else if (fx.immunity_ticks > 0) {
        --fx.immunity_ticks;
      }
    }
    std::erase_if(e.effects, [](const EffectState& fx) {
      return !fx.active && fx.remaining_ticks == 0 && fx.immunity_ticks == 0;
    });
  }
}

void move_enemies(GameState& s) {
  for (auto& e : s.enemies) {
    e.prev_progress = e.progress;
    const double length = s.route_of(e).total_length();
    const double speed = s.variant_of(e).speed * slow_multiplier(e);
    if (feared(e)) {
      const double back = speed * e.effect(EffectKind::Fear)->magnitude * kTickSeconds;
      e.progress = std::max(0.0, e.progress - back);
    } else {
      e.progress = std::min(length, e.progress + speed * kTickSeconds);
    }
  }
}

void apply_poison(GameState& s) {
  for (auto& e : s.enemies) {
    const auto* poison = e.effect(EffectKind::Poison);
    if (poison && poison->active) e.health -= poison->magnitude * kTickSeconds;
  }
}

EffectState* find_effect(EnemyInstance& e, EffectKind k) {
  for (auto& fx : e.effects) {
    if (fx.kind == k) return &fx;
  }
  return nullptr;
}

void apply_on_hit(EnemyInstance& e, const TowerSpec& spec) {
  const auto& p = spec.effects;
  switch (spec.archetype) {
    case Archetype::Slow: {
      const int ticks = seconds_to_ticks(p.slow_duration);
      if (auto* fx = find_effect(e, EffectKind::Slow)) {
        fx->magnitude = std::min(fx->magnitude, p.slow_multiplier);
        fx->remaining_ticks = std::max(fx->remaining_ticks, ticks);
      } else {
        e.effects.push_back({.kind = EffectKind::Slow, .magnitude = p.slow_multiplier, .remaining_ticks = ticks});
      }
      break;
    }
    case Archetype::Poison: {
      const int ticks = seconds_to_ticks(p.poison_duration);
      if (auto* fx = find_effect(e, EffectKind::Poison)) {
        fx->magnitude = std::max(fx->magnitude, p.poison_dps);
        fx->remaining_ticks = ticks;
      } else {
        e.effects.push_back({.kind = EffectKind::Poison, .magnitude = p.poison_dps, .remaining_ticks = ticks});
      }
      break;
    }
    case Archetype::Fear:
      // An existing entry is either an active fear or its immunity window.
      if (!find_effect(e, EffectKind::Fear)) {
        e.effects.push_back({.kind = EffectKind::Fear,
                             .magnitude = p.fear_multiplier,
                             .remaining_ticks = seconds_to_ticks(p.fear_duration),
                             .immunity_ticks = seconds_to_ticks(p.fear_immunity)});
      }
      break;
    default:
      break;
  }
}

double effective_speed(const GameState& s, const EnemyInstance& e) {
  return s.variant_of(e).speed * slow_multiplier(e);
}

void hit(GameState& s, EnemyInstance& e, const TowerSpec& spec, double damage) {
  if (spec.archetype == Archetype::Sniper) damage *= sniper_factor(spec.effects, effective_speed(s, e));
  e.health -= damage;
  apply_on_hit(e, spec);
}

struct RayHit {
  double along = 0.0;
  double across = 0.0;
};

RayHit project(Point origin, Point dir_unit, Point p) {
  const double dx = p.x - origin.x;
  const double dy = p.y - origin.y;
  return {dx * dir_unit.x + dy * dir_unit.y, std::abs(dx * dir_unit.y - dy * dir_unit.x)};
}

bool fire(GameState& s, const TowerInstance& tower, const TowerSpec& spec, const TowerStats& stats) {
  const Point origin = centre(tower.cell);
  switch (spec.archetype) {
    case Archetype::Map: {
      bool any = false;
      for (auto& e : s.enemies) {
        if (!alive(e)) continue;
        hit(s, e, spec, stats.damage);
        any = true;
      }
      return any;
    }
    case Archetype::Multishot: {
      constexpr Point dirs[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      std::vector<std::size_t> victims;
      for (const auto dir : dirs) {
        std::optional<std::size_t> first;
        double first_along = 0.0;
        for (std::size_t i = 0; i < s.enemies.size(); ++i) {
          const auto& e = s.enemies[i];
          if (!alive(e)) continue;
          const Point pos = enemy_position(s, e);
          if (distance(origin, pos) > stats.range + kEps) continue;
          const auto r = project(origin, dir, pos);
          if (r.along < -kEps || r.across > spec.effects.ray_half_width + kEps) continue;
          if (!first || r.along < first_along - kEps) {
            first = i;
            first_along = r.along;
          }
        }
        if (first) victims.push_back(*first);
      }
      for (auto i : victims) hit(s, s.enemies[i], spec, stats.damage);
      return !victims.empty();
    }
    default:
      break;
  }

  const auto target = select_target(s, tower);
  if (!target) return false;
  auto& primary = s.enemies[*target];
  switch (spec.archetype) {
    case Archetype::Piercing: {
      const Point tp = enemy_position(s, primary);
      const double len = distance(origin, tp);
      if (len < kEps) {
        hit(s, primary, spec, stats.damage);
        return true;
      }
      const Point dir{(tp.x - origin.x) / len, (tp.y - origin.y) / len};
      std::vector<std::size_t> victims;
      for (std::size_t i = 0; i < s.enemies.size(); ++i) {
        const auto& e = s.enemies[i];
        if (!alive(e)) continue;
        const Point pos = enemy_position(s, e);
        if (distance(origin, pos) > stats.range + kEps) continue;
        const auto r = project(origin, dir, pos);
        if (r.along >= -kEps && r.across <= spec.effects.ray_half_width + kEps) victims.push_back(i);
      }
      for (auto i : victims) hit(s, s.enemies[i], spec, stats.damage);
      return true;
    }
    case Archetype::Splash: {
      const Point tp = enemy_position(s, primary);
      std::vector<std::size_t> victims;
      for (std::size_t i = 0; i < s.enemies.size(); ++i) {
        const auto& e = s.enemies[i];
        if (alive(e) && distance(enemy_position(s, e), tp) <= spec.effects.splash_radius + kEps) {
          victims.push_back(i);
        }
      }
      for (auto i : victims) hit(s, s.enemies[i], spec, stats.damage);
      return true;
    }
    default:
      hit(s, primary, spec, stats.damage);
      return true;
  }
}

void spring_trap(GameState& s, TowerInstance& tower, const TowerSpec& spec) {
  if (!tower.trap_cell) return;
  const int recharge = std::max(1, seconds_to_ticks(spec.effects.trap_recharge));
  if (s.tick % recharge == 0) tower.trap_charges = spec.effects.trap_charges;
  const double damage = effective_stats(s, tower).damage;
  for (auto& e : s.enemies) {
    if (tower.trap_charges <= 0) break;
    if (!alive(e)) continue;
    const auto& wp = s.route_of(e).waypoints;
    for (std::size_t i = 0; i < wp.size() && tower.trap_charges > 0; ++i) {
      if (wp[i] != *tower.trap_cell) continue;
      const double mark = static_cast<double>(i);
      if (e.prev_progress < mark - kEps && e.progress >= mark - kEps) {
        e.health -= damage;
        --tower.trap_charges;
      }
    }
  }
}

void towers_fire(GameState& s) {
  for (auto& tower : s.towers) {
    const auto& spec = s.spec_of(tower);
    if (!attacks(spec.archetype)) continue;
    if (spec.archetype == Archetype::Obstacle) {
      spring_trap(s, tower, spec);
      continue;
    }
    if (tower.cooldown_ticks > 0.0) tower.cooldown_ticks -= 1.0;
    if (tower.cooldown_ticks > kEps) continue;
    const auto stats = effective_stats(s, tower);
    if (stats.firerate <= 0.0) continue;
    if (fire(s, tower, spec, stats)) {
      tower.cooldown_ticks += kTickRate / stats.firerate;
    } else {
      tower.cooldown_ticks = std::max(tower.cooldown_ticks, 0.0);
    }
  }
}

void reap_dead(GameState& s, Events& out) {
  for (const auto& e : s.enemies) {
    if (alive(e)) continue;
    const auto& v = s.variant_of(e);
    credit_bounty(s, v.bounty);
    s.kill_points += v.points;
    ++s.ledger.kills;
    SimEvent ev{.kind = EventKind::Killed, .tick = s.tick};
    ev.subject = e.variant_id;
    ev.entity = e.spawn_index;
    ev.amount = v.bounty;
    ev.points = v.points;
    out.push_back(std::move(ev));
  }
  std::erase_if(s.enemies, [](const EnemyInstance& e) { return !alive(e); });
}

void leak_arrivals(GameState& s, Events& out) {
  for (const auto& e : s.enemies) {
    if (e.progress < s.route_of(e).total_length() - kEps) continue;
    s.health -= 1;
    ++s.ledger.leaks;
    SimEvent ev{.kind = EventKind::Leaked, .tick = s.tick};
    ev.subject = e.variant_id;
    ev.entity = e.spawn_index;
    ev.amount = 1;
    out.push_back(std::move(ev));
  }
  std::erase_if(s.enemies, [&](const EnemyInstance& e) {
    return e.progress >= s.route_of(e).total_length() - kEps;
  });
}

}  // namespace

std::optional<std::size_t> select_target(const GameState& state, const TowerInstance& tower) {
  const auto& spec = state.spec_of(tower);
  if (!attacks(spec.archetype)) return std::nullopt;
  const bool everywhere = spec.archetype == Archetype::Map;
  const double range = everywhere ? 0.0 : effective_stats(state, tower).range;
  const Point origin = centre(tower.cell);
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < state.enemies.size(); ++i) {
    const auto& e = state.enemies[i];
    if (!alive(e)) continue;
    if (!everywhere && distance(origin, enemy_position(state, e)) > range + kEps) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& b = state.enemies[*best];
    if (e.progress > b.progress + kEps ||
        (std::abs(e.progress - b.progress) <= kEps && e.spawn_index < b.spawn_index)) {
      best = i;
    }
  }
  return best;
}

Events tick(GameState& state) {
  if (state.phase != Phase::Attack) throw std::logic_error("tick called outside ATTACK");
  Events out;
  ++state.tick;
  state.sim_time = static_cast<double>(state.tick) * kTickSeconds;

  spawn_due(state, out);
  decay_effects(state);
  move_enemies(state);
  apply_poison(state);
  towers_fire(state);
  reap_dead(state, out);
  leak_arrivals(state, out);

  if (state.health <= 0) {
    end_round(state, Outcome::Lose, out);
  } else if (state.pending_spawns.empty() && state.enemies.empty()) {
    end_round(state, Outcome::Win, out);
  }
  return out;
}

}  // namespace taskforge
