#include "properties.hpp"

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "scenarios.hpp"
#include "taskforge/config/config.hpp"
#include "taskforge/sim/autoplay.hpp"
#include "taskforge/sim/digest.hpp"

namespace taskforge::testkit {

namespace {

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
double real(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

const SimEvent* terminal(const Events& events) {
  const SimEvent* last = nullptr;
  for (const auto& e : events) {
    if (e.kind == EventKind::Killed || e.kind == EventKind::Leaked) last = &e;
  }
  return last;
}

}  // namespace

PropertyReport oracle_grid() {
  PropertyReport r;
  const Cell at{5, 1};
  for (double damage : {5.0, 10.0, 20.0}) {
    for (double firerate : {0.5, 1.0, 2.0}) {
      for (double speed : {0.5, 1.0, 2.0}) {
        for (double range : {2.0, 3.0, 5.0}) {
          ++r.cases;
          LineScenario sc;
          sc.enemy = {"e", 100.0, speed, 10, 25};
          sc.towers = {make_tower("T", Archetype::Basic, range, damage, firerate)};
          auto s = start_attack(line_config(sc), {{"T", at}});
          const auto events = run_to_end(s);
          const auto* end = terminal(events);
          const auto oracle = scalar_oracle(100.0, speed, 10.0, at, range, damage, firerate);
          std::ostringstream why;
          why << "damage=" << damage << " firerate=" << firerate << " speed=" << speed << " range=" << range;
          if (!end) {
            r.fail(why.str() + ": no kill or leak");
            continue;
          }
          const bool killed = end->kind == EventKind::Killed;
          const double t = static_cast<double>(end->tick) * kTickSeconds;
          if (killed != oracle.killed || std::abs(t - oracle.time) > kTickSeconds + 1e-9) {
            why << ": sim " << (killed ? "kill" : "leak") << "@" << t << " oracle "
                << (oracle.killed ? "kill" : "leak") << "@" << oracle.time;
            r.fail(why.str());
          }
        }
      }
    }
  }
  return r;
}

namespace {

struct Flow {
  std::int64_t purchases = 0;
  std::int64_t refunds = 0;
  std::int64_t bounties = 0;
  long spawned = 0;
  long kills = 0;
  long leaks = 0;

  void add(const Events& events) {
    for (const auto& e : events) {
      switch (e.kind) {
        case EventKind::Placed:
        case EventKind::Upgraded: purchases += e.amount; break;
        case EventKind::Sold: refunds += e.amount; break;
        case EventKind::Killed:
          bounties += e.amount;
          ++kills;
          break;
        case EventKind::Spawned: ++spawned; break;
        case EventKind::Leaked: ++leaks; break;
        default: break;
      }
    }
  }
};

std::shared_ptr<const SessionConfig> fuzz_config(int which) {
  static const std::vector<std::shared_ptr<const SessionConfig>> configs = [] {
    std::vector<std::shared_ptr<const SessionConfig>> out;
    for (const char* name : {"case-study", "stress", "tutorial"}) {
      auto base = builtin_preset(name);
      for (int variant = 0; variant < 2; ++variant) {
        auto c = base;
        c.interact_during_attack = true;
        if (variant == 1) {
          c.money_model = MoneyModel::Individual;
          c.sell_policy = SellPolicy::Anyone;
        }
        out.push_back(std::make_shared<const SessionConfig>(std::move(c)));
      }
    }
    return out;
  }();
  return configs[static_cast<std::size_t>(which) % configs.size()];
}

void check_exclusivity(const GameState& s, PropertyReport& r, const std::string& where) {
  std::set<Cell> cells;
  std::set<Cell> traps;
  for (const auto& t : s.towers) {
    if (!cells.insert(t.cell).second) r.fail(where + ": two towers on " + to_string(t.cell));
    if (s.map().at(t.cell) != TileKind::Buildable) r.fail(where + ": tower off buildable " + to_string(t.cell));
    if (t.trap_cell) {
      if (!traps.insert(*t.trap_cell).second) r.fail(where + ": two traps on " + to_string(*t.trap_cell));
      if (s.map().at(*t.trap_cell) != TileKind::Path) r.fail(where + ": trap off path");
    }
  }
}

}  // namespace

FuzzReport economy_fuzz(int sequences, std::uint64_t seed) {
  FuzzReport rep;
  std::mt19937_64 rng(seed);
  for (int seq = 0; seq < sequences; ++seq) {
    auto cfg = fuzz_config(uniform(rng, 0, 5));
    const int level = uniform(rng, 0, static_cast<int>(cfg->levels.size()) - 1);
    GameState s = init_game(cfg, level, 0);
    Flow flow;
    const std::string tag = "seq " + std::to_string(seq);

    auto check_economy = [&](const std::string& where) {
      ++rep.economy.cases;
      if (s.ledger.starting_gold + flow.bounties != s.total_money() + flow.purchases - flow.refunds) {
        rep.economy.fail(where + ": conservation broken");
      }
      for (auto m : s.money) {
        if (m < 0) rep.economy.fail(where + ": negative pool");
      }
      ++rep.exclusivity.cases;
      check_exclusivity(s, rep.exclusivity, where);
    };
    auto issue = [&](const std::string& where) {
      const Command c = random_command(s, rng);
      const auto before = state_digest(s);
      ++rep.commands;
      auto r = apply_command(s, c);
      ++rep.rejection.cases;
      if (r) {
        flow.add(*r);
      } else if (state_digest(s) != before) {
        rep.rejection.fail(where + ": rejected " + std::string(error_code(r.error())) + " changed state");
      }
      check_economy(where);
    };

    const int planning_cmds = uniform(rng, 0, 40);
    for (int i = 0; i < planning_cmds && s.phase == Phase::Planning; ++i) issue(tag + " planning");
    for (int slot = 0; slot < cfg->slot_count() && s.phase == Phase::Planning; ++slot) {
      auto r = apply_command(s, {.issuer = slot, .kind = CommandKind::Ready});
      if (r) flow.add(*r);
    }
    const double command_rate = real(rng, 0.0, 0.2);
    const int max_ticks = 600;
    for (int t = 0; t < max_ticks && s.phase == Phase::Attack; ++t) {
      const std::string where = tag + " tick " + std::to_string(s.tick + 1);
      if (std::bernoulli_distribution(command_rate)(rng)) {
        issue(where);
        if (s.phase != Phase::Attack) break;
      }
      std::map<int, double> progress_before;
      for (const auto& e : s.enemies) progress_before[e.spawn_index] = e.progress;
      const auto health_before = s.health;
      auto events = tick(s);
      ++rep.ticks;
      flow.add(events);
      check_economy(where);

      long leaked = 0;
      for (const auto& e : events) leaked += e.kind == EventKind::Leaked ? 1 : 0;
      ++rep.health.cases;
      if (s.health > health_before) rep.health.fail(where + ": health increased");
      if (health_before - s.health != leaked) rep.health.fail(where + ": health drop != leaks");

      for (const auto& e : s.enemies) {
        ++rep.progress.cases;
        const double len = s.route_of(e).total_length();
        if (e.progress < 0.0 || e.progress > len + 1e-12) rep.progress.fail(where + ": progress out of bounds");
        const auto it = progress_before.find(e.spawn_index);
        const auto* fear = e.effect(EffectKind::Fear);
        if (it != progress_before.end() && !(fear && fear->active) && e.progress < it->second - 1e-12) {
          rep.progress.fail(where + ": moved backwards without fear");
        }
      }
    }
    ++rep.kill_accounting.cases;
    if (flow.kills != flow.spawned - flow.leaks - static_cast<long>(s.enemies.size())) {
      rep.kill_accounting.fail(tag + ": kills != spawned - leaked - alive");
    }
  }
  return rep;
}

PropertyReport phase_gating(int samples, std::uint64_t seed) {
  PropertyReport r;
  std::mt19937_64 rng(seed);
  auto cfg = std::make_shared<const SessionConfig>(builtin_preset("case-study"));
  for (int level = 0; level < 3; ++level) {
    GameState s = init_game(cfg, level, 0);
    for (const auto& c : scripted_plan(s)) apply_command(s, c);
    for (int i = 0; i < samples && s.phase == Phase::Attack; ++i) {
      Command c = random_command(s, rng);
      if (c.kind == CommandKind::Ready) c.kind = CommandKind::Place;
      const auto before = state_digest(s);
      auto res = apply_command(s, c);
      ++r.cases;
      if (res || res.error() != CommandError::PhaseViolation) {
        r.fail("level " + std::to_string(level) + ": " + std::string(to_string(c.kind)) + " accepted or wrong error");
      }
      if (state_digest(s) != before) r.fail("rejected attack command changed state");
      tick(s);
    }
  }
  return r;
}

namespace {

Cell random_cell_off_path(std::mt19937_64& rng, int length) { return {uniform(rng, 0, length), uniform(rng, 1, 3)}; }

long leak_tick(GameState& s, bool* slowed_while_moving = nullptr) {
  while (s.phase == Phase::Attack) {
    auto ev = tick(s);
    for (const auto& e : ev) {
      if (e.kind == EventKind::Leaked) return e.tick;
    }
    if (slowed_while_moving) {
      for (const auto& e : s.enemies) {
        const auto* fx = e.effect(EffectKind::Slow);
        if (fx && fx->active) *slowed_while_moving = true;
      }
    }
  }
  return -1;
}

}  // namespace

PropertyReport slow_differential(int scenarios, std::uint64_t seed) {
  PropertyReport r;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < scenarios; ++i) {
    LineScenario sc;
    sc.route_length = uniform(rng, 6, 14);
    sc.enemy = {"e", 1e9, real(rng, 0.3, 3.0), 1, 1};
    auto slow = make_tower("S", Archetype::Slow, real(rng, 1.0, 4.0), 0.0, 0.001);
    slow.effects.slow_multiplier = real(rng, 0.1, 0.9);
    slow.effects.slow_duration = real(rng, 0.2, 4.0);
    sc.towers = {slow};
    const Cell at = random_cell_off_path(rng, sc.route_length);
    auto cfg = line_config(sc);

    GameState base = start_attack(cfg, {});
    GameState slowed = start_attack(cfg, {{"S", at}});
    const long t0 = leak_tick(base);
    bool overlapped = false;
    const long t1 = leak_tick(slowed, &overlapped);
    ++r.cases;
    std::ostringstream why;
    why << "scenario " << i << ": base " << t0 << " slowed " << t1;
    if (t0 < 0 || t1 < 0 || t1 < t0) r.fail(why.str());
    if (overlapped && t1 <= t0) r.fail(why.str() + " (overlap without delay)");
  }
  return r;
}

PropertyReport fear_differential(int scenarios, std::uint64_t seed) {
  PropertyReport r;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < scenarios; ++i) {
    LineScenario sc;
    sc.route_length = uniform(rng, 8, 14);
    sc.enemy = {"e", 1e9, real(rng, 0.3, 3.0), 1, 1};
    auto fear = make_tower("F", Archetype::Fear, real(rng, 1.5, 5.0), 0.0, 20.0);
    fear.effects.fear_multiplier = real(rng, 0.5, 1.5);
    fear.effects.fear_duration = real(rng, 0.2, 3.0);
    fear.effects.fear_immunity = real(rng, 0.5, 6.0);
    sc.towers = {fear};
    const Cell at = random_cell_off_path(rng, sc.route_length);
    auto cfg = line_config(sc);
    GameState s = start_attack(cfg, {{"F", at}});
    const int immunity = seconds_to_ticks(fear.effects.fear_immunity);
    const std::string tag = "scenario " + std::to_string(i);

    long last_active = -1;
    long expect_refear_at = -1;
    int episodes = 0;
    bool prev_active = false;
    for (int t = 0; t < 4000 && s.phase == Phase::Attack; ++t) {
      const double before = s.enemies.empty() ? 0.0 : s.enemies[0].progress;
      const bool existed = !s.enemies.empty();
      tick(s);
      if (s.enemies.empty()) {
        prev_active = false;
        continue;
      }
      const auto& e = s.enemies[0];
      const auto* fx = e.effect(EffectKind::Fear);
      const bool active = fx && fx->active;
      ++r.cases;
      if (active && existed && e.progress - before > 1e-12) r.fail(tag + ": advanced while feared");
      if (active && !prev_active) {
        ++episodes;
        if (last_active >= 0 && s.tick - last_active - 1 < immunity) {
          r.fail(tag + ": feared again after " + std::to_string(s.tick - last_active - 1) + " ticks of immunity " +
                 std::to_string(immunity));
        }
      }
      if (expect_refear_at >= 0 && s.tick == expect_refear_at && !active) {
        r.fail(tag + ": not feared again once immunity elapsed");
      }
      if (active) last_active = s.tick;
      if (!active && prev_active) {
        // the entry expires at tick last_active + immunity; if the enemy is in range then,
        // the tower (firing every tick) re-applies and the fear is active one tick later
        expect_refear_at = -1;
      }
      if (!active && last_active >= 0 && s.tick == last_active + immunity) {
        const double range = effective_stats(s, s.towers[0]).range;
        if (distance(centre(at), enemy_position(s, e)) <= range - 1e-6) expect_refear_at = s.tick + 1;
      }
      prev_active = active;
    }
    (void)episodes;
  }
  return r;
}

PropertyReport support_differential(int scenarios, std::uint64_t seed) {
  PropertyReport r;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < scenarios; ++i) {
    LineScenario sc;
    sc.route_length = 12;
    sc.spawn_times = {};
    sc.planning_seconds = 10;
    sc.towers = {make_tower("B", Archetype::Basic, real(rng, 1, 5), real(rng, 1, 30), real(rng, 0.2, 3)),
                 make_tower("N", Archetype::Sniper, real(rng, 1, 8), real(rng, 1, 30), real(rng, 0.2, 3)),
                 make_tower("S", Archetype::Support, real(rng, 1, 5), 0, 1)};
    sc.towers[2].effects.support_buff = real(rng, 0.0, 0.6);
    auto cfg = line_config(sc);
    GameState s = init_game(cfg, 0, 0);
    const int n = uniform(rng, 2, 10);
    for (int k = 0; k < n; ++k) {
      const std::string id = k < 2 ? std::string(1, "BN"[k]) : std::string(1, "BNS"[uniform(rng, 0, 2)]);
      apply_command(s, {.issuer = 0, .kind = CommandKind::Place, .spec_id = id, .cell = random_cell_off_path(rng, 12)});
    }
    for (int k = 0; k < 6 && !s.towers.empty(); ++k) {
      const auto& t = s.towers[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(s.towers.size()) - 1))];
      apply_command(s, {.issuer = 0, .kind = CommandKind::Upgrade, .cell = t.cell,
                        .track = static_cast<UpgradeTrack>(uniform(rng, 0, 2))});
    }
    GameState bare = s;
    std::erase_if(bare.towers, [&](const TowerInstance& t) { return t.spec_id == "S"; });
    for (const auto& t : bare.towers) {
      const auto with = effective_stats(s, *s.find_tower(t.id));
      const auto without = effective_stats(bare, t);
      ++r.cases;
      if (with.range < without.range || with.damage < without.damage || with.firerate < without.firerate) {
        r.fail("scenario " + std::to_string(i) + ": support lowered a stat");
      }
      // buffs do not stack: the factor is the single strongest support covering the tower
      double buff = 0.0;
      for (const auto& o : s.towers) {
        if (o.spec_id != "S") continue;
        const double reach = cfg->tower_catalog[2].range * std::pow(1.25, o.level(UpgradeTrack::Range));
        const double dx = o.cell.x - t.cell.x;
        const double dy = o.cell.y - t.cell.y;
        if (std::sqrt(dx * dx + dy * dy) <= reach + 1e-9) buff = std::max(buff, cfg->tower_catalog[2].effects.support_buff);
      }
      if (std::abs(with.damage - without.damage * (1.0 + buff)) > 1e-9 * with.damage ||
          std::abs(with.range - without.range * (1.0 + buff)) > 1e-9 * with.range) {
        r.fail("scenario " + std::to_string(i) + ": buff factor differs from the strongest single support");
      }
    }
  }
  return r;
}

PropertyReport discount_differential(int scenarios, std::uint64_t seed) {
  PropertyReport r;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < scenarios; ++i) {
    LineScenario sc;
    sc.route_length = 12;
    sc.spawn_times = {};
    sc.planning_seconds = 10;
    sc.towers = {make_tower("B", Archetype::Basic, 3, 10, 1, 100, uniform(rng, 1, 999))};
    const int kinds = uniform(rng, 0, 3);
    for (int k = 0; k < kinds; ++k) {
      auto d = make_tower("D" + std::to_string(k), Archetype::Discount, real(rng, 1, 6), 0, 1, 100, 50);
      d.effects.discount_multiplier = real(rng, 0.0, 1.0);
      sc.towers.push_back(d);
    }
    auto cfg = line_config(sc);
    GameState s = init_game(cfg, 0, 0);
    const Cell target_cell = random_cell_off_path(rng, 12);
    apply_command(s, {.issuer = 0, .kind = CommandKind::Place, .spec_id = "B", .cell = target_cell});
    const int discounts = kinds == 0 ? 0 : uniform(rng, 1, 5);
    for (int k = 0; k < discounts; ++k) {
      const Cell c = random_cell_off_path(rng, 12);
      if (apply_command(s, {.issuer = 0, .kind = CommandKind::Place, .spec_id = "D" + std::to_string(uniform(rng, 0, kinds - 1)),
                            .cell = c})) {
        for (int u = uniform(rng, 0, 2); u > 0; --u) {
          apply_command(s, {.issuer = 0, .kind = CommandKind::Upgrade, .cell = c, .track = UpgradeTrack::Range});
        }
      }
    }
    const auto track = static_cast<UpgradeTrack>(uniform(rng, 0, 2));
    for (int u = uniform(rng, 0, 2); u > 0; --u) {
      apply_command(s, {.issuer = 0, .kind = CommandKind::Upgrade, .cell = target_cell, .track = track});
    }
    const auto* target = s.tower_at(target_cell);
    if (!target) continue;
    const auto full = undiscounted_upgrade_cost(cfg->tower_catalog[0], target->level(track));
    const auto cost = upgrade_cost(s, *target, track);
    // cheapest single discount covering the target, recomputed from the specs
    double mult = 1.0;
    for (const auto& d : s.towers) {
      const auto& spec = s.spec_of(d);
      if (d.id == target->id || spec.archetype != Archetype::Discount) continue;
      const double reach = spec.range * std::pow(1.25, d.level(UpgradeTrack::Range));
      const double dx = d.cell.x - target_cell.x;
      const double dy = d.cell.y - target_cell.y;
      if (std::sqrt(dx * dx + dy * dy) <= reach + 1e-9) mult = std::min(mult, spec.effects.discount_multiplier);
    }
    const std::int64_t best = std::llround(static_cast<double>(full) * mult);
    ++r.cases;
    if (cost < 0 || cost > full) r.fail("scenario " + std::to_string(i) + ": cost outside [0, undiscounted]");
    if (cost != best) {
      r.fail("scenario " + std::to_string(i) + ": cost " + std::to_string(cost) + " != best single discount " +
             std::to_string(best));
    }
  }
  return r;
}

}  // namespace taskforge::testkit
