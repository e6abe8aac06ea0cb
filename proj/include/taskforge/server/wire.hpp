#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "taskforge/sim/game.hpp"
#include "taskforge/util/expected.hpp"

namespace taskforge::server {

using json = nlohmann::json;

// Client to server.
inline constexpr std::string_view kJoin = "JOIN";
inline constexpr std::string_view kSetTeamName = "SET_TEAM_NAME";
inline constexpr std::string_view kChat = "CHAT";
inline constexpr std::string_view kPlace = "PLACE";
inline constexpr std::string_view kSell = "SELL";
inline constexpr std::string_view kUpgrade = "UPGRADE";
inline constexpr std::string_view kReady = "READY";
inline constexpr std::string_view kSelect = "SELECT";
inline constexpr std::string_view kPing = "PING";
inline constexpr std::string_view kStart = "START";

// Server to client.
inline constexpr std::string_view kLobbyState = "LOBBY_STATE";
inline constexpr std::string_view kGameSnapshot = "GAME_SNAPSHOT";
inline constexpr std::string_view kGameDelta = "GAME_DELTA";
inline constexpr std::string_view kChatRelay = "CHAT_RELAY";
inline constexpr std::string_view kError = "ERROR";
inline constexpr std::string_view kRoundResult = "ROUND_RESULT";
inline constexpr std::string_view kLeaderboard = "LEADERBOARD";

/// {seq, type, room, payload}
struct Envelope {
  std::int64_t seq = 0;
  std::string type;
  std::string room;
  json payload = json::object();
};

std::string encode(const Envelope& e);  // one line, no trailing newline
/// Errors name the offending field.
Expected<Envelope, std::string> decode(std::string_view line);

json to_json(Cell c);
std::optional<Cell> cell_from_json(const json& j);

json to_json(const SimEvent& e);
SimEvent event_from_json(const json& j);

/// Full authoritative state for (re)join and periodic resync.
json snapshot_json(const GameState& s);

/// Game intent payload {player, kind, cell, tower_type, track, text, ...} to a sim command for `issuer`.
/// Only PLACE, SELL, UPGRADE, READY and SELECT map to commands.
Expected<Command, std::string> command_from_intent(std::string_view type, const json& payload, int issuer);
/// Inverse used by bots: the intent payload for a command.
json intent_payload(const Command& c);
std::string_view intent_type(CommandKind k);

}  // namespace taskforge::server
