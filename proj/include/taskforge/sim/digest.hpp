#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "taskforge/sim/game.hpp"

namespace taskforge {

/// Canonical text form of a state: fixed field order, exact integers, reals with 6 decimals.
std::string canonical_state(const GameState& state);

/// One canonical line per event, same rules as canonical_state.
std::string canonical_events(const Events& events);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// 16 lowercase hex digits of fnv1a64(canonical_state(state)).
std::string state_digest(const GameState& state);

/// Incremental digest over an event stream.
class EventDigest {
 public:
  void add(const Events& events);
  void add(const SimEvent& event);
  std::string hex() const;
  std::uint64_t value() const { return hash_; }
  std::size_t count() const { return count_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
  std::size_t count_ = 0;
};

std::string to_hex(std::uint64_t v);

}  // namespace taskforge
