#include "taskforge/server/wire.hpp"

#include "taskforge/sim/digest.hpp"

namespace taskforge::server {

std::string encode(const Envelope& e) {
  json j;
  j["seq"] = e.seq;
  j["type"] = e.type;
  j["room"] = e.room;
  j["payload"] = e.payload;
  return j.dump();
}

Expected<Envelope, std::string> decode(std::string_view line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return unexpected(std::string("message is not a JSON object"));
  Envelope e;
  if (j.contains("seq")) {
    if (!j["seq"].is_number_integer()) return unexpected(std::string("seq must be an integer"));
    e.seq = j["seq"].get<std::int64_t>();
  }
  if (!j.contains("type") || !j["type"].is_string()) return unexpected(std::string("type missing"));
  e.type = j["type"].get<std::string>();
  if (j.contains("room")) {
    if (!j["room"].is_string()) return unexpected(std::string("room must be a string"));
    e.room = j["room"].get<std::string>();
  }
  if (j.contains("payload")) {
    if (!j["payload"].is_object()) return unexpected(std::string("payload must be an object"));
    e.payload = j["payload"];
  }
  return e;
}

json to_json(Cell c) { return json::array({c.x, c.y}); }

std::optional<Cell> cell_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) return std::nullopt;
  return Cell{j[0].get<int>(), j[1].get<int>()};
}

json to_json(const SimEvent& e) {
  json j;
  j["kind"] = to_string(e.kind);
  j["tick"] = e.tick;
  j["actor"] = e.actor;
  j["cell"] = e.cell ? to_json(*e.cell) : json(nullptr);
  j["subject"] = e.subject;
  j["entity"] = e.entity;
  j["amount"] = e.amount;
  j["points"] = e.points;
  j["level"] = e.level;
  j["detail"] = e.detail;
  return j;
}

SimEvent event_from_json(const json& j) {
  SimEvent e;
  static const EventKind kinds[] = {EventKind::Placed, EventKind::Sold,         EventKind::Upgraded,
                                    EventKind::Spawned, EventKind::Killed,     EventKind::Leaked,
                                    EventKind::PhaseChanged, EventKind::RoundEnded};
  const auto name = j.value("kind", std::string());
  for (auto k : kinds) {
    if (to_string(k) == name) e.kind = k;
  }
  e.tick = j.value("tick", std::int64_t{0});
  e.actor = j.value("actor", -1);
  if (j.contains("cell")) e.cell = cell_from_json(j["cell"]);
  e.subject = j.value("subject", std::string());
  e.entity = j.value("entity", -1);
  e.amount = j.value("amount", std::int64_t{0});
  e.points = j.value("points", std::int64_t{0});
  e.level = j.value("level", 0);
  e.detail = j.value("detail", std::string());
  return e;
}

json snapshot_json(const GameState& s) {
  json j;
  j["level"] = s.level_index;
  j["round"] = s.round_index;
  j["phase"] = to_string(s.phase);
  j["outcome"] = to_string(s.outcome);
  j["tick"] = s.tick;
  j["planning_remaining"] = s.planning_remaining();
  j["money"] = s.money;
  j["health"] = s.health;
  j["kill_points"] = s.kill_points;
  j["ready"] = s.ready;
  j["participating"] = s.participating;
  json towers = json::array();
  for (const auto& t : s.towers) {
    json tj;
    tj["id"] = t.id;
    tj["spec"] = t.spec_id;
    tj["owner"] = t.owner;
    tj["cell"] = to_json(t.cell);
    tj["orientation"] = t.orientation;
    tj["levels"] = {{"RANGE", t.levels[0]}, {"DAMAGE", t.levels[1]}, {"FIRERATE", t.levels[2]}};
    tj["spent"] = t.total_spent;
    if (t.trap_cell) {
      tj["trap"] = to_json(*t.trap_cell);
      tj["trap_charges"] = t.trap_charges;
    }
    towers.push_back(std::move(tj));
  }
  j["towers"] = std::move(towers);
  json enemies = json::array();
  for (const auto& e : s.enemies) {
    const auto p = enemy_position(s, e);
    json ej;
    ej["index"] = e.spawn_index;
    ej["variant"] = e.variant_id;
    ej["route"] = e.route_id;
    ej["progress"] = e.progress;
    ej["health"] = e.health;
    ej["pos"] = json::array({p.x, p.y});
    json fx = json::array();
    for (const auto& f : e.effects) {
      fx.push_back({{"kind", to_string(f.kind)}, {"active", f.active}, {"remaining", f.remaining()}});
    }
    ej["effects"] = std::move(fx);
    enemies.push_back(std::move(ej));
  }
  j["enemies"] = std::move(enemies);
  j["pending_spawns"] = s.pending_spawns.size();
  if (s.selected_tower) j["selected_tower"] = *s.selected_tower;
  if (s.layout_score) j["layout_score"] = *s.layout_score;
  j["digest"] = state_digest(s);
  return j;
}

std::string_view intent_type(CommandKind k) {
  switch (k) {
    case CommandKind::Place: return kPlace;
    case CommandKind::Sell: return kSell;
    case CommandKind::Upgrade: return kUpgrade;
    case CommandKind::Ready: return kReady;
    case CommandKind::Select: return kSelect;
  }
  return "?";
}

Expected<Command, std::string> command_from_intent(std::string_view type, const json& p, int issuer) {
  Command c;
  c.issuer = issuer;
  auto need_cell = [&]() -> bool {
    if (!p.contains("cell")) return false;
    c.cell = cell_from_json(p["cell"]);
    return c.cell.has_value();
  };
  if (type == kPlace) {
    c.kind = CommandKind::Place;
    if (!need_cell()) return unexpected(std::string("cell must be [x, y]"));
    if (!p.contains("tower_type") || !p["tower_type"].is_string()) return unexpected(std::string("tower_type missing"));
    c.spec_id = p["tower_type"].get<std::string>();
    if (p.contains("orientation")) {
      if (!p["orientation"].is_number_integer()) return unexpected(std::string("orientation must be an integer"));
      c.orientation = p["orientation"].get<int>();
    }
  } else if (type == kSell) {
    c.kind = CommandKind::Sell;
    if (!need_cell()) return unexpected(std::string("cell must be [x, y]"));
  } else if (type == kUpgrade) {
    c.kind = CommandKind::Upgrade;
    if (!need_cell()) return unexpected(std::string("cell must be [x, y]"));
    if (!p.contains("track") || !p["track"].is_string()) return unexpected(std::string("track missing"));
    c.track = parse_track(p["track"].get<std::string>());
    if (!c.track) return unexpected(std::string("unknown track"));
  } else if (type == kReady) {
    c.kind = CommandKind::Ready;
    if (p.contains("ready")) {
      if (!p["ready"].is_boolean()) return unexpected(std::string("ready must be a boolean"));
      c.ready = p["ready"].get<bool>();
    }
  } else if (type == kSelect) {
    c.kind = CommandKind::Select;
    if (p.contains("tower_id")) {
      if (!p["tower_id"].is_number_integer()) return unexpected(std::string("tower_id must be an integer"));
      c.tower_id = p["tower_id"].get<int>();
    } else if (!need_cell()) {
      return unexpected(std::string("cell or tower_id required"));
    }
  } else {
    return unexpected("not a game intent: " + std::string(type));
  }
  return c;
}

json intent_payload(const Command& c) {
  json p;
  p["player"] = c.issuer;
  p["kind"] = intent_type(c.kind);
  if (c.cell) p["cell"] = to_json(*c.cell);
  if (c.kind == CommandKind::Place) {
    p["tower_type"] = c.spec_id;
    p["orientation"] = c.orientation;
  }
  if (c.track) p["track"] = to_string(*c.track);
  if (c.tower_id) p["tower_id"] = *c.tower_id;
  if (c.kind == CommandKind::Ready) p["ready"] = c.ready;
  return p;
}

}  // namespace taskforge::server
