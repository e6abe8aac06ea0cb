#include "taskforge/sim/digest.hpp"

#include <cstdio>

namespace taskforge {

namespace {

class Canon {
 public:
  Canon& key(std::string_view k) {
    out_ += k;
    out_ += '=';
    return *this;
  }
  Canon& num(std::int64_t v) {
    out_ += std::to_string(v);
    out_ += ';';
    return *this;
  }
  Canon& real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v == 0.0 ? 0.0 : v);  // no "-0.000000"
    out_ += buf;
    out_ += ';';
    return *this;
  }
  Canon& str(std::string_view s) {
    out_ += std::to_string(s.size());
    out_ += ':';
    out_ += s;
    out_ += ';';
    return *this;
  }
  Canon& cell(Cell c) {
    return num(c.x).num(c.y);
  }
  Canon& end() {
    out_ += '\n';
    return *this;
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

void write_event(Canon& c, const SimEvent& e) {
  c.key("event").str(to_string(e.kind));
  c.key("tick").num(e.tick);
  c.key("actor").num(e.actor);
  c.key("cell");
  if (e.cell) {
    c.cell(*e.cell);
  } else {
    c.str("");
  }
  c.key("subject").str(e.subject);
  c.key("entity").num(e.entity);
  c.key("amount").num(e.amount);
  c.key("points").num(e.points);
  c.key("level").num(e.level);
  c.key("detail").str(e.detail).end();
}

}  // namespace

std::string canonical_state(const GameState& s) {
  Canon c;
  c.key("level").num(s.level_index).key("round").num(s.round_index);
  c.key("phase").str(to_string(s.phase)).key("outcome").str(to_string(s.outcome));
  c.key("tick").num(s.tick).key("sim_time").real(s.sim_time);
  c.key("planning_ticks").num(s.planning_ticks_remaining).end();
  c.key("money");
  for (auto m : s.money) c.num(m);
  c.end();
  c.key("health").num(s.health).key("kill_points").num(s.kill_points).end();
  c.key("ready");
  for (bool r : s.ready) c.num(r ? 1 : 0);
  c.key("participating");
  for (bool p : s.participating) c.num(p ? 1 : 0);
  c.end();
  for (const auto& t : s.towers) {
    c.key("tower").num(t.id).str(t.spec_id).num(t.owner).cell(t.cell).num(t.orientation);
    c.key("levels").num(t.levels[0]).num(t.levels[1]).num(t.levels[2]);
    c.key("cooldown").real(t.cooldown_ticks).key("spent").num(t.total_spent);
    c.key("trap");
    if (t.trap_cell) {
      c.cell(*t.trap_cell);
    } else {
      c.str("");
    }
    c.num(t.trap_charges).end();
  }
  for (const auto& e : s.enemies) {
    c.key("enemy").num(e.spawn_index).str(e.variant_id).str(e.route_id);
    c.key("progress").real(e.progress).key("health").real(e.health);
    for (const auto& fx : e.effects) {
      c.key("fx").str(to_string(fx.kind)).real(fx.magnitude).num(fx.remaining_ticks).num(fx.immunity_ticks);
    }
    c.end();
  }
  for (const auto& p : s.pending_spawns) {
    c.key("pending").num(p.spawn_tick).str(p.variant_id).str(p.route_id).end();
  }
  const auto& l = s.ledger;
  c.key("ledger").num(l.starting_gold).num(l.bounties).num(l.purchases).num(l.refunds);
  c.num(l.spawned).num(l.kills).num(l.leaks).end();
  c.key("next").num(s.next_tower_id).num(s.next_spawn_index);
  c.key("selected").num(s.selected_tower.value_or(-1));
  c.key("layout");
  if (s.layout_score) {
    c.real(*s.layout_score);
  } else {
    c.str("");
  }
  c.end();
  return c.take();
}

std::string canonical_events(const Events& events) {
  Canon c;
  for (const auto& e : events) write_event(c, e);
  return c.take();
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string state_digest(const GameState& state) { return to_hex(fnv1a64(canonical_state(state))); }

void EventDigest::add(const SimEvent& event) {
  Canon c;
  write_event(c, event);
  hash_ = fnv1a64(c.take(), hash_);
  ++count_;
}

void EventDigest::add(const Events& events) {
  for (const auto& e : events) add(e);
}

std::string EventDigest::hex() const { return to_hex(hash_); }

}  // namespace taskforge
