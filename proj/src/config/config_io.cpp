// JSON configuration document: reading with strict field/type checks, canonical writing.

#include <algorithm>
#include <cctype>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "taskforge/config/config.hpp"

namespace taskforge {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string ParseIssue::to_string() const {
  std::ostringstream os;
  if (line > 0) os << "line " << line << ", column " << column << ": ";
  if (!path.empty()) os << path << ": ";
  os << message;
  return os.str();
}

namespace {

constexpr std::string_view kFormatTag = "taskforge-config/1";

template <class E, std::size_t N>
std::optional<E> lookup(std::string_view s, const std::pair<E, std::string_view> (&table)[N]) {
  for (const auto& [value, name] : table) {
    if (name == s) return value;
  }
  return std::nullopt;
}

constexpr std::pair<GameMode, std::string_view> kModes[] = {
    {GameMode::TowerDefense, "TOWER_DEFENSE"},
    {GameMode::ObjectSelection, "OBJECT_SELECTION"},
    {GameMode::ObjectManipulation, "OBJECT_MANIPULATION"},
};
constexpr std::pair<MoneyModel, std::string_view> kMoneyModels[] = {
    {MoneyModel::Shared, "SHARED"}, {MoneyModel::Individual, "INDIVIDUAL"}};
constexpr std::pair<SellPolicy, std::string_view> kSellPolicies[] = {
    {SellPolicy::Anyone, "ANYONE"}, {SellPolicy::OwnerOnly, "OWNER_ONLY"}};
constexpr std::pair<ScoreMode, std::string_view> kScoreModes[] = {
    {ScoreMode::Binary, "BINARY"}, {ScoreMode::Linear, "LINEAR"}};
constexpr std::pair<AgentKind, std::string_view> kAgents[] = {
    {AgentKind::Human, "H"}, {AgentKind::Ai, "AI"}};

char tile_char(TileKind k) {
  switch (k) {
    case TileKind::Buildable: return '.';
    case TileKind::Path: return '>';
    case TileKind::Blocked: return '#';
    case TileKind::Base: return 'B';
  }
  return '?';
}

class Reader {
 public:
  ParseIssues issues;

  void fail(const std::string& path, std::string msg) { issues.push_back({path, std::move(msg)}); }

  bool object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    fail(path, "expected an object");
    return false;
  }

  bool array(const json& j, const std::string& path) {
    if (j.is_array()) return true;
    fail(path, "expected an array");
    return false;
  }

  void allow_only(const json& obj, std::initializer_list<std::string_view> keys, const std::string& path) {
    for (const auto& [k, v] : obj.items()) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) fail(join(path, k), "unknown field");
    }
  }

  static std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
  }
  static std::string index(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
  }

  // Returns the member or nullptr; reports a missing required field.
  const json* member(const json& obj, std::string_view key, const std::string& path, bool required) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) fail(join(path, key), "missing required field");
      return nullptr;
    }
    return &*it;
  }

  bool read(const json& j, bool& out, const std::string& path) {
    if (!j.is_boolean()) return type_error(path, "boolean");
    out = j.get<bool>();
    return true;
  }
  bool read(const json& j, int& out, const std::string& path) {
    std::int64_t v = 0;
    if (!read(j, v, path)) return false;
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
      fail(path, "integer out of range");
      return false;
    }
    out = static_cast<int>(v);
    return true;
  }
  bool read(const json& j, std::int64_t& out, const std::string& path) {
    if (!j.is_number_integer()) return type_error(path, "integer");
    out = j.get<std::int64_t>();
    return true;
  }
  bool read(const json& j, double& out, const std::string& path) {
    if (!j.is_number()) return type_error(path, "number");
    out = j.get<double>();
    return true;
  }
  bool read(const json& j, std::string& out, const std::string& path) {
    if (!j.is_string()) return type_error(path, "string");
    out = j.get<std::string>();
    return true;
  }
  bool read(const json& j, Cell& out, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
      return type_error(path, "[x, y] integer pair");
    }
    out = {j[0].get<int>(), j[1].get<int>()};
    return true;
  }
  template <class T>
  bool read(const json& j, std::optional<T>& out, const std::string& path) {
    T v{};
    if (!read(j, v, path)) return false;
    out = v;
    return true;
  }
  bool read(const json& j, std::vector<std::string>& out, const std::string& path) {
    if (!array(j, path)) return false;
    out.clear();
    for (std::size_t i = 0; i < j.size(); ++i) {
      std::string s;
      if (read(j[i], s, index(path, i))) out.push_back(std::move(s));
    }
    return true;
  }

  template <class E, std::size_t N>
  bool read_enum(const json& j, E& out, const std::pair<E, std::string_view> (&table)[N], const std::string& path) {
    std::string s;
    if (!read(j, s, path)) return false;
    auto v = lookup(s, table);
    if (!v) {
      fail(path, "unknown value \"" + s + "\"");
      return false;
    }
    out = *v;
    return true;
  }

  template <class T>
  void field(const json& obj, std::string_view key, T& out, const std::string& path, bool required = false) {
    if (const json* j = member(obj, key, path, required)) read(*j, out, join(path, key));
  }

  template <class E, std::size_t N>
  void enum_field(const json& obj, std::string_view key, E& out, const std::pair<E, std::string_view> (&table)[N],
                  const std::string& path, bool required = false) {
    if (const json* j = member(obj, key, path, required)) read_enum(*j, out, table, join(path, key));
  }

 private:
  bool type_error(const std::string& path, std::string_view expected) {
    fail(path, "type mismatch: expected " + std::string(expected));
    return false;
  }
};

std::vector<Cell> expand_moves(Cell start, std::string_view moves, Reader& r, const std::string& path) {
  std::vector<Cell> cells{start};
  std::istringstream in{std::string(moves)};
  std::string token;
  while (in >> token) {
    const char dir = static_cast<char>(std::toupper(static_cast<unsigned char>(token[0])));
    int steps = 1;
    if (token.size() > 1) {
      try {
        std::size_t used = 0;
        steps = std::stoi(token.substr(1), &used);
        if (used != token.size() - 1 || steps < 1) throw std::invalid_argument("steps");
      } catch (const std::exception&) {
        r.fail(path, "bad move token \"" + token + "\"");
        return cells;
      }
    }
    int dx = 0;
    int dy = 0;
    switch (dir) {
      case 'E': dx = 1; break;
      case 'W': dx = -1; break;
      case 'S': dy = 1; break;
      case 'N': dy = -1; break;
      default:
        r.fail(path, "bad move token \"" + token + "\"");
        return cells;
    }
    for (int i = 0; i < steps; ++i) cells.push_back({cells.back().x + dx, cells.back().y + dy});
  }
  return cells;
}

// Run-length move string, or empty when the cell list is not a 4-adjacent walk.
std::optional<std::string> compress_moves(const std::vector<Cell>& cells) {
  if (cells.size() < 2) return std::nullopt;
  std::string out;
  char run = 0;
  int count = 0;
  auto flush = [&] {
    if (!count) return;
    if (!out.empty()) out += ' ';
    out += run;
    out += std::to_string(count);
  };
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const int dx = cells[i].x - cells[i - 1].x;
    const int dy = cells[i].y - cells[i - 1].y;
    char d = 0;
    if (dx == 1 && dy == 0) d = 'E';
    else if (dx == -1 && dy == 0) d = 'W';
    else if (dx == 0 && dy == 1) d = 'S';
    else if (dx == 0 && dy == -1) d = 'N';
    else return std::nullopt;
    if (d != run) {
      flush();
      run = d;
      count = 0;
    }
    ++count;
  }
  flush();
  return out;
}

void read_map(const json& j, GridMap& map, Reader& r, const std::string& path) {
  if (!r.object(j, path)) return;
  r.allow_only(j, {"grid", "routes"}, path);
  std::vector<std::string> rows;
  if (const json* g = r.member(j, "grid", path, true)) r.read(*g, rows, Reader::join(path, "grid"));
  map.height = static_cast<int>(rows.size());
  map.width = rows.empty() ? 0 : static_cast<int>(rows.front().size());
  map.tiles.assign(static_cast<std::size_t>(map.width * map.height), TileKind::Buildable);
  int bases = 0;
  for (int y = 0; y < map.height; ++y) {
    const auto& row = rows[static_cast<std::size_t>(y)];
    const std::string row_path = Reader::index(Reader::join(path, "grid"), static_cast<std::size_t>(y));
    if (static_cast<int>(row.size()) != map.width) {
      r.fail(row_path, "grid rows must all have the same length");
      continue;
    }
    for (int x = 0; x < map.width; ++x) {
      TileKind k = TileKind::Buildable;
      switch (row[static_cast<std::size_t>(x)]) {
        case '.': k = TileKind::Buildable; break;
        case '#': k = TileKind::Blocked; break;
        case '>':
        case 'S': k = TileKind::Path; break;
        case 'B':
          k = TileKind::Base;
          map.base_cell = {x, y};
          ++bases;
          break;
        default:
          r.fail(row_path, std::string("unknown tile character '") + row[static_cast<std::size_t>(x)] + "'");
      }
      map.set({x, y}, k);
    }
  }
  if (!rows.empty() && bases != 1) r.fail(Reader::join(path, "grid"), "grid must contain exactly one base 'B'");

  const json* routes = r.member(j, "routes", path, true);
  if (!routes) return;
  const std::string routes_path = Reader::join(path, "routes");
  if (!r.array(*routes, routes_path)) return;
  for (std::size_t i = 0; i < routes->size(); ++i) {
    const auto& rj = (*routes)[i];
    const std::string rp = Reader::index(routes_path, i);
    if (!r.object(rj, rp)) continue;
    r.allow_only(rj, {"id", "cells", "start", "moves"}, rp);
    PathRoute route;
    r.field(rj, "id", route.id, rp, true);
    if (const json* cells = r.member(rj, "cells", rp, false)) {
      const std::string cp = Reader::join(rp, "cells");
      if (r.array(*cells, cp)) {
        for (std::size_t k = 0; k < cells->size(); ++k) {
          Cell c;
          if (r.read((*cells)[k], c, Reader::index(cp, k))) route.waypoints.push_back(c);
        }
      }
    } else {
      Cell start;
      std::string moves;
      r.field(rj, "start", start, rp, true);
      r.field(rj, "moves", moves, rp, true);
      route.waypoints = expand_moves(start, moves, r, Reader::join(rp, "moves"));
    }
    map.routes.push_back(std::move(route));
  }
}

void read_placement(const json& j, Placement& p, Reader& r, const std::string& path) {
  if (!r.object(j, path)) return;
  r.allow_only(j, {"tower", "cell", "orientation"}, path);
  r.field(j, "tower", p.spec_id, path, true);
  r.field(j, "cell", p.cell, path, true);
  r.field(j, "orientation", p.orientation, path);
}

template <class T, class Fn>
void read_list(const json& parent, std::string_view key, std::vector<T>& out, Reader& r, const std::string& path,
               bool required, Fn&& each) {
  const json* arr = r.member(parent, key, path, required);
  if (!arr) return;
  const std::string ap = Reader::join(path, key);
  if (!r.array(*arr, ap)) return;
  for (std::size_t i = 0; i < arr->size(); ++i) {
    T item{};
    each((*arr)[i], item, Reader::index(ap, i));
    out.push_back(std::move(item));
  }
}

void read_level(const json& j, LevelSpec& level, Reader& r, const std::string& path) {
  if (!r.object(j, path)) return;
  r.allow_only(j,
               {"name", "starting_gold", "starting_health", "planning_seconds", "min_win_cost", "map", "spawns",
                "preplaced", "reference_layout", "selection_target"},
               path);
  r.field(j, "name", level.name, path);
  r.field(j, "starting_gold", level.starting_gold, path, true);
  r.field(j, "starting_health", level.starting_health, path, true);
  r.field(j, "planning_seconds", level.planning_seconds, path, true);
  r.field(j, "min_win_cost", level.min_win_cost, path);
  r.field(j, "selection_target", level.selection_target, path);
  if (const json* m = r.member(j, "map", path, true)) read_map(*m, level.map, r, Reader::join(path, "map"));
  read_list(j, "spawns", level.map.spawn_points, r, path, false, [&](const json& sj, SpawnScript& s, const std::string& sp) {
    if (!r.object(sj, sp)) return;
    r.allow_only(sj, {"id", "route", "entries"}, sp);
    r.field(sj, "id", s.id, sp, true);
    r.field(sj, "route", s.route_id, sp, true);
    read_list(sj, "entries", s.entries, r, sp, true, [&](const json& ej, SpawnEntry& e, const std::string& ep) {
      if (!ej.is_array() || ej.size() != 2) {
        r.fail(ep, "type mismatch: expected [variant, seconds]");
        return;
      }
      r.read(ej[0], e.variant_id, Reader::index(ep, 0));
      r.read(ej[1], e.spawn_time, Reader::index(ep, 1));
    });
  });
  auto placement = [&](const json& pj, Placement& p, const std::string& pp) { read_placement(pj, p, r, pp); };
  read_list(j, "preplaced", level.preplaced, r, path, false, placement);
  read_list(j, "reference_layout", level.reference_layout, r, path, false, placement);
}

void read_effects(const json& j, EffectParams& fx, Reader& r, const std::string& path) {
  if (!r.object(j, path)) return;
  r.allow_only(j,
               {"poison_dps", "poison_duration", "splash_radius", "slow_multiplier", "slow_duration",
                "fear_multiplier", "fear_duration", "fear_immunity", "sniper_reference_speed", "sniper_cap",
                "trap_charges", "trap_recharge", "discount_multiplier", "support_buff", "ray_half_width"},
               path);
  r.field(j, "poison_dps", fx.poison_dps, path);
  r.field(j, "poison_duration", fx.poison_duration, path);
  r.field(j, "splash_radius", fx.splash_radius, path);
  r.field(j, "slow_multiplier", fx.slow_multiplier, path);
  r.field(j, "slow_duration", fx.slow_duration, path);
  r.field(j, "fear_multiplier", fx.fear_multiplier, path);
  r.field(j, "fear_duration", fx.fear_duration, path);
  r.field(j, "fear_immunity", fx.fear_immunity, path);
  r.field(j, "sniper_reference_speed", fx.sniper_reference_speed, path);
  r.field(j, "sniper_cap", fx.sniper_cap, path);
  r.field(j, "trap_charges", fx.trap_charges, path);
  r.field(j, "trap_recharge", fx.trap_recharge, path);
  r.field(j, "discount_multiplier", fx.discount_multiplier, path);
  r.field(j, "support_buff", fx.support_buff, path);
  r.field(j, "ray_half_width", fx.ray_half_width, path);
}

void line_column(std::string_view text, std::size_t byte, int& line, int& column) {
  line = 1;
  column = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
}

}  // namespace

Expected<SessionConfig, ParseIssues> parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    ParseIssue issue{.path = "", .message = "syntax error"};
    line_column(text, e.byte, issue.line, issue.column);
    std::string what = e.what();
    if (auto pos = what.find("syntax error"); pos != std::string::npos) issue.message = what.substr(pos);
    return unexpected(ParseIssues{issue});
  }

  Reader r;
  SessionConfig cfg;
  if (!r.object(doc, "")) return unexpected(std::move(r.issues));
  r.allow_only(doc,
               {"format", "mode", "rounds_per_level", "money_model", "sell_policy", "interact_during_attack", "comm",
                "visibility", "score", "refund", "solution_space_note", "intermission_seconds",
                "pause_planning_when_empty", "team", "towers", "enemies", "levels"},
               "");
  if (const json* f = r.member(doc, "format", "", false)) {
    std::string tag;
    if (r.read(*f, tag, "format") && tag != kFormatTag) r.fail("format", "unsupported format \"" + tag + "\"");
  }
  r.enum_field(doc, "mode", cfg.mode, kModes, "");
  r.field(doc, "rounds_per_level", cfg.rounds_per_level, "");
  r.enum_field(doc, "money_model", cfg.money_model, kMoneyModels, "");
  r.enum_field(doc, "sell_policy", cfg.sell_policy, kSellPolicies, "");
  r.field(doc, "interact_during_attack", cfg.interact_during_attack, "");
  r.field(doc, "solution_space_note", cfg.solution_space_note, "");
  r.field(doc, "intermission_seconds", cfg.intermission_seconds, "");
  r.field(doc, "pause_planning_when_empty", cfg.pause_planning_when_empty, "");

  if (const json* c = r.member(doc, "comm", "", false); c && r.object(*c, "comm")) {
    r.allow_only(*c, {"text_chat", "voice", "push_to_talk"}, "comm");
    r.field(*c, "text_chat", cfg.comm.text_chat, "comm");
    r.field(*c, "voice", cfg.comm.voice, "comm");
    r.field(*c, "push_to_talk", cfg.comm.push_to_talk, "comm");
  }
  if (const json* v = r.member(doc, "visibility", "", false); v && r.object(*v, "visibility")) {
    r.allow_only(*v, {"tower_names", "tower_descriptions", "coordinate_grid", "spawn_preview"}, "visibility");
    r.field(*v, "tower_names", cfg.visibility.tower_names, "visibility");
    r.field(*v, "tower_descriptions", cfg.visibility.tower_descriptions, "visibility");
    r.field(*v, "coordinate_grid", cfg.visibility.coordinate_grid, "visibility");
    r.field(*v, "spawn_preview", cfg.visibility.spawn_preview, "visibility");
  }
  if (const json* s = r.member(doc, "score", "", false); s && r.object(*s, "score")) {
    r.allow_only(*s, {"mode", "w_unspent", "w_points", "w_health"}, "score");
    r.enum_field(*s, "mode", cfg.score.mode, kScoreModes, "score", true);
    r.field(*s, "w_unspent", cfg.score.w_unspent, "score");
    r.field(*s, "w_points", cfg.score.w_points, "score");
    r.field(*s, "w_health", cfg.score.w_health, "score");
  }
  if (const json* f = r.member(doc, "refund", "", false); f && r.object(*f, "refund")) {
    r.allow_only(*f, {"planning", "attack"}, "refund");
    r.field(*f, "planning", cfg.refund.planning, "refund");
    r.field(*f, "attack", cfg.refund.attack, "refund");
  }

  read_list(doc, "team", cfg.team, r, "", true, [&](const json& tj, TowerAssignment& a, const std::string& p) {
    if (!r.object(tj, p)) return;
    r.allow_only(tj, {"slot", "agent", "color", "towers"}, p);
    r.field(tj, "slot", a.slot, p, true);
    r.enum_field(tj, "agent", a.agent, kAgents, p);
    r.field(tj, "color", a.color, p, true);
    r.field(tj, "towers", a.towers, p, true);
  });
  read_list(doc, "towers", cfg.tower_catalog, r, "", true, [&](const json& tj, TowerSpec& t, const std::string& p) {
    if (!r.object(tj, p)) return;
    r.allow_only(tj, {"id", "archetype", "cost", "upgrade_cost", "range", "damage", "firerate", "name",
                      "description", "effects"},
                 p);
    r.field(tj, "id", t.id, p, true);
    if (const json* a = r.member(tj, "archetype", p, true)) {
      std::string name;
      if (r.read(*a, name, Reader::join(p, "archetype"))) {
        if (auto arch = parse_archetype(name)) {
          t.archetype = *arch;
        } else {
          r.fail(Reader::join(p, "archetype"), "unknown value \"" + name + "\"");
        }
      }
    }
    r.field(tj, "cost", t.cost, p, true);
    r.field(tj, "upgrade_cost", t.upgrade_cost, p, true);
    r.field(tj, "range", t.range, p, true);
    r.field(tj, "damage", t.damage, p, true);
    r.field(tj, "firerate", t.firerate, p, true);
    r.field(tj, "name", t.display_name, p);
    r.field(tj, "description", t.description, p);
    if (const json* fx = r.member(tj, "effects", p, false)) read_effects(*fx, t.effects, r, Reader::join(p, "effects"));
  });
  read_list(doc, "enemies", cfg.enemy_catalog, r, "", true, [&](const json& ej, EnemyVariant& e, const std::string& p) {
    if (!r.object(ej, p)) return;
    r.allow_only(ej, {"id", "max_health", "speed", "points", "bounty"}, p);
    r.field(ej, "id", e.id, p, true);
    r.field(ej, "max_health", e.max_health, p, true);
    r.field(ej, "speed", e.speed, p, true);
    r.field(ej, "points", e.points, p, true);
    r.field(ej, "bounty", e.bounty, p, true);
  });
  read_list(doc, "levels", cfg.levels, r, "", true,
            [&](const json& lj, LevelSpec& l, const std::string& p) { read_level(lj, l, r, p); });

  if (!r.issues.empty()) return unexpected(std::move(r.issues));
  return cfg;
}

namespace {

ojson cell_json(Cell c) { return ojson::array({c.x, c.y}); }

ojson placement_json(const Placement& p) {
  ojson j;
  j["tower"] = p.spec_id;
  j["cell"] = cell_json(p.cell);
  j["orientation"] = p.orientation;
  return j;
}

ojson effects_json(const EffectParams& fx) {
  const EffectParams d;
  ojson j = ojson::object();
  auto put = [&](const char* key, auto value, auto def) {
    if (value != def) j[key] = value;
  };
  put("poison_dps", fx.poison_dps, d.poison_dps);
  put("poison_duration", fx.poison_duration, d.poison_duration);
  put("splash_radius", fx.splash_radius, d.splash_radius);
  put("slow_multiplier", fx.slow_multiplier, d.slow_multiplier);
  put("slow_duration", fx.slow_duration, d.slow_duration);
  put("fear_multiplier", fx.fear_multiplier, d.fear_multiplier);
  put("fear_duration", fx.fear_duration, d.fear_duration);
  put("fear_immunity", fx.fear_immunity, d.fear_immunity);
  put("sniper_reference_speed", fx.sniper_reference_speed, d.sniper_reference_speed);
  put("sniper_cap", fx.sniper_cap, d.sniper_cap);
  put("trap_charges", fx.trap_charges, d.trap_charges);
  put("trap_recharge", fx.trap_recharge, d.trap_recharge);
  put("discount_multiplier", fx.discount_multiplier, d.discount_multiplier);
  put("support_buff", fx.support_buff, d.support_buff);
  put("ray_half_width", fx.ray_half_width, d.ray_half_width);
  return j;
}

std::string_view agent_name(AgentKind a) { return a == AgentKind::Human ? "H" : "AI"; }

ojson map_json(const GridMap& map) {
  std::vector<std::string> rows(static_cast<std::size_t>(map.height), std::string(static_cast<std::size_t>(map.width), '.'));
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] = tile_char(map.at({x, y}));
  }
  for (const auto& s : map.spawn_points) {
    const auto* route = map.find_route(s.route_id);
    if (!route || route->waypoints.empty()) continue;
    const Cell head = route->waypoints.front();
    if (map.in_bounds(head) && map.at(head) == TileKind::Path) {
      rows[static_cast<std::size_t>(head.y)][static_cast<std::size_t>(head.x)] = 'S';
    }
  }
  ojson j;
  j["grid"] = rows;
  ojson routes = ojson::array();
  for (const auto& r : map.routes) {
    ojson rj;
    rj["id"] = r.id;
    if (auto moves = compress_moves(r.waypoints)) {
      rj["start"] = cell_json(r.waypoints.front());
      rj["moves"] = *moves;
    } else {
      ojson cells = ojson::array();
      for (auto c : r.waypoints) cells.push_back(cell_json(c));
      rj["cells"] = cells;
    }
    routes.push_back(rj);
  }
  j["routes"] = routes;
  return j;
}

// Keeps two-element arrays ([x, y] cells, spawn entries) on one line.
std::string compact_pairs(const std::string& pretty) {
  std::string out;
  out.reserve(pretty.size());
  bool in_str = false;
  std::size_t i = 0;
  while (i < pretty.size()) {
    const char ch = pretty[i];
    if (in_str) {
      out += ch;
      if (ch == '\\' && i + 1 < pretty.size()) {
        out += pretty[++i];
      } else if (ch == '"') {
        in_str = false;
      }
      ++i;
      continue;
    }
    if (ch == '"') {
      in_str = true;
      out += ch;
      ++i;
      continue;
    }
    if (ch == '[') {
      // Collect tokens up to the matching ']' if the array is flat with exactly two scalars.
      std::vector<std::string> tokens;
      std::string tok;
      bool str = false;
      bool flat = true;
      std::size_t j = i + 1;
      for (; j < pretty.size(); ++j) {
        const char c = pretty[j];
        if (str) {
          tok += c;
          if (c == '\\' && j + 1 < pretty.size()) {
            tok += pretty[++j];
          } else if (c == '"') {
            str = false;
          }
          continue;
        }
        if (c == '"') {
          str = true;
          tok += c;
        } else if (c == '[' || c == '{') {
          flat = false;
          break;
        } else if (c == ']') {
          break;
        } else if (c == ',') {
          tokens.push_back(tok);
          tok.clear();
        } else if (c != ' ' && c != '\n') {
          tok += c;
        }
      }
      if (flat && j < pretty.size() && pretty[j] == ']' && tokens.size() == 1 && !tok.empty()) {
        out += "[" + tokens[0] + ", " + tok + "]";
        i = j + 1;
        continue;
      }
    }
    out += ch;
    ++i;
  }
  return out;
}

}  // namespace

std::string serialize_config(const SessionConfig& cfg) {
  ojson doc;
  doc["format"] = kFormatTag;
  doc["mode"] = to_string(cfg.mode);
  doc["rounds_per_level"] = cfg.rounds_per_level;
  doc["money_model"] = to_string(cfg.money_model);
  doc["sell_policy"] = to_string(cfg.sell_policy);
  doc["interact_during_attack"] = cfg.interact_during_attack;
  doc["comm"] = {{"text_chat", cfg.comm.text_chat}, {"voice", cfg.comm.voice}, {"push_to_talk", cfg.comm.push_to_talk}};
  doc["visibility"] = {{"tower_names", cfg.visibility.tower_names},
                       {"tower_descriptions", cfg.visibility.tower_descriptions},
                       {"coordinate_grid", cfg.visibility.coordinate_grid},
                       {"spawn_preview", cfg.visibility.spawn_preview}};
  doc["score"] = {{"mode", to_string(cfg.score.mode)},
                  {"w_unspent", cfg.score.w_unspent},
                  {"w_points", cfg.score.w_points},
                  {"w_health", cfg.score.w_health}};
  doc["refund"] = {{"planning", cfg.refund.planning}, {"attack", cfg.refund.attack}};
  doc["solution_space_note"] = cfg.solution_space_note;
  doc["intermission_seconds"] = cfg.intermission_seconds;
  doc["pause_planning_when_empty"] = cfg.pause_planning_when_empty;

  ojson team = ojson::array();
  for (const auto& a : cfg.team) {
    ojson aj;
    aj["slot"] = a.slot;
    aj["agent"] = agent_name(a.agent);
    aj["color"] = a.color;
    aj["towers"] = a.towers;
    team.push_back(aj);
  }
  doc["team"] = team;

  ojson towers = ojson::array();
  for (const auto& t : cfg.tower_catalog) {
    ojson tj;
    tj["id"] = t.id;
    tj["archetype"] = to_string(t.archetype);
    tj["cost"] = t.cost;
    tj["upgrade_cost"] = t.upgrade_cost;
    tj["range"] = t.range;
    tj["damage"] = t.damage;
    tj["firerate"] = t.firerate;
    tj["name"] = t.display_name;
    tj["description"] = t.description;
    if (auto fx = effects_json(t.effects); !fx.empty()) tj["effects"] = fx;
    towers.push_back(tj);
  }
  doc["towers"] = towers;

  ojson enemies = ojson::array();
  for (const auto& e : cfg.enemy_catalog) {
    ojson ej;
    ej["id"] = e.id;
    ej["max_health"] = e.max_health;
    ej["speed"] = e.speed;
    ej["points"] = e.points;
    ej["bounty"] = e.bounty;
    enemies.push_back(ej);
  }
  doc["enemies"] = enemies;

  ojson levels = ojson::array();
  for (const auto& l : cfg.levels) {
    ojson lj;
    lj["name"] = l.name;
    lj["starting_gold"] = l.starting_gold;
    lj["starting_health"] = l.starting_health;
    lj["planning_seconds"] = l.planning_seconds;
    if (l.min_win_cost) lj["min_win_cost"] = *l.min_win_cost;
    lj["map"] = map_json(l.map);
    ojson spawns = ojson::array();
    for (const auto& s : l.map.spawn_points) {
      ojson sj;
      sj["id"] = s.id;
      sj["route"] = s.route_id;
      ojson entries = ojson::array();
      for (const auto& e : s.entries) entries.push_back(ojson::array({e.variant_id, e.spawn_time}));
      sj["entries"] = entries;
      spawns.push_back(sj);
    }
    lj["spawns"] = spawns;
    if (!l.preplaced.empty()) {
      ojson arr = ojson::array();
      for (const auto& p : l.preplaced) arr.push_back(placement_json(p));
      lj["preplaced"] = arr;
    }
    if (!l.reference_layout.empty()) {
      ojson arr = ojson::array();
      for (const auto& p : l.reference_layout) arr.push_back(placement_json(p));
      lj["reference_layout"] = arr;
    }
    if (l.selection_target) lj["selection_target"] = *l.selection_target;
    levels.push_back(lj);
  }
  doc["levels"] = levels;
  return compact_pairs(doc.dump(2)) + "\n";
}

}  // namespace taskforge
