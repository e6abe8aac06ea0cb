#pragma once

#include <chrono>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "taskforge/server/room.hpp"

namespace taskforge::server {

struct BotOptions {
  std::string name = "bot";
  std::string token;          // rejoin with this token instead of joining fresh
  Role role = Role::Player;
  double reserve = 0.6;       // share of the starting gold left unspent
  bool start = false;         // send START once `wait_players` seats are taken
  int wait_players = 1;
  int max_rounds = -1;        // leave after this many ROUND_RESULTs; -1 plays to the end
  std::vector<std::string> chat;  // chat line i is sent in round i
  std::chrono::milliseconds timeout{60000};  // longest silence tolerated
};

struct BotReport {
  std::optional<int> slot;
  std::string token;
  int rounds = 0;
  int accepted = 0;
  int rejected = 0;
  std::vector<json> results;  // ROUND_RESULT payloads
  std::vector<Envelope> received;
  std::string error;
  bool finished = false;
};

/// Plays one seat over the socket transport with the scripted build order for its slot.
BotReport run_bot(const std::string& host, unsigned short port, const std::string& room, const BotOptions& options);

}  // namespace taskforge::server
