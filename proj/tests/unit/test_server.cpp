#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "support/scenarios.hpp"
#include "support/server_harness.hpp"
#include "taskforge/config/config.hpp"
#include "taskforge/server/client.hpp"
#include "taskforge/server/transport.hpp"
#include "taskforge/sim/autoplay.hpp"
#include "taskforge/telemetry/log_record.hpp"

using namespace taskforge;
using namespace taskforge::server;
using namespace taskforge::testkit;

namespace {

std::shared_ptr<const SessionConfig> preset(const char* name, double planning = -1) {
  auto c = builtin_preset(name);
  if (planning >= 0) {
    for (auto& l : c.levels) l.planning_seconds = planning;
  }
  return std::make_shared<const SessionConfig>(std::move(c));
}

RoomOptions quick() {
  RoomOptions o;
  o.intermission_seconds = 0.0;
  return o;
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("taskforge_server_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

// ---- wire ---------------------------------------------------------------------

TEST(Wire, EnvelopeRoundTrip) {
  Envelope e{7, "PLACE", "QX7K2P", {{"cell", {3, 4}}, {"tower_type", "BASIC"}}};
  auto back = decode(encode(e));
  ASSERT_TRUE(back);
  EXPECT_EQ(back->seq, 7);
  EXPECT_EQ(back->type, "PLACE");
  EXPECT_EQ(back->room, "QX7K2P");
  EXPECT_EQ(back->payload, e.payload);
}

TEST(Wire, DecodeRejectsMalformed) {
  EXPECT_FALSE(decode("not json"));
  EXPECT_FALSE(decode("[1,2]"));
  EXPECT_FALSE(decode(R"({"seq":1})"));
  EXPECT_FALSE(decode(R"({"seq":"x","type":"PING"})"));
  EXPECT_FALSE(decode(R"({"type":"PING","payload":[]})"));
  EXPECT_TRUE(decode(R"({"type":"PING"})"));
}

TEST(Wire, IntentPayloadRoundTripsRandomCommands) {
  auto cfg = preset("case-study");
  GameState s = init_game(cfg, 2, 0);
  std::mt19937_64 rng(41);
  for (int i = 0; i < 500; ++i) {
    const auto c = random_command(s, rng);
    const auto p = intent_payload(c);
    auto back = command_from_intent(intent_type(c.kind), p, c.issuer);
    ASSERT_TRUE(back) << back.error();
    EXPECT_EQ(intent_payload(*back), p);
  }
}

TEST(Wire, IntentErrorsNameTheField) {
  EXPECT_EQ(command_from_intent("PLACE", {{"tower_type", "BASIC"}}, 0).error(), "cell must be [x, y]");
  EXPECT_EQ(command_from_intent("PLACE", {{"cell", {1, 1}}}, 0).error(), "tower_type missing");
  EXPECT_EQ(command_from_intent("UPGRADE", {{"cell", {1, 1}}, {"track", "SPEED"}}, 0).error(), "unknown track");
  EXPECT_EQ(command_from_intent("SELL", {{"cell", {1}}}, 0).error(), "cell must be [x, y]");
  EXPECT_FALSE(command_from_intent("CHAT", json::object(), 0));
}

TEST(Wire, EventJsonRoundTrip) {
  SimEvent e{EventKind::Upgraded, 42, 2, Cell{3, 4}, "SLOW", 5, 180, 0, 2, "DAMAGE"};
  EXPECT_EQ(event_from_json(to_json(e)), e);
}

// ---- registry -----------------------------------------------------------------

TEST(Registry, KeysAreUniqueAcross10000Rooms) {
  asio::io_context io;
  RegistryOptions o;
  o.seed = 99;
  Registry reg(io, o);
  std::set<std::string> keys;
  auto cfg = builtin_preset("tutorial");
  for (int i = 0; i < 10000; ++i) {
    auto r = reg.create_room("host", cfg);
    ASSERT_TRUE(r);
    ASSERT_TRUE(valid_room_key(r->key)) << r->key;
    keys.insert(r->key);
  }
  EXPECT_EQ(keys.size(), 10000u);
  EXPECT_EQ(reg.size(), 10000u);
}

TEST(Registry, RegeneratesOnCollision) {
  asio::io_context io;
  RegistryOptions o;
  std::vector<std::string> scripted = {"AAAAAA", "AAAAAA", "AAAAAA", "BBBBBB"};
  std::size_t next = 0;
  o.key_source = [&] { return scripted[next++]; };
  Registry reg(io, o);
  EXPECT_EQ(reg.create_room("a", builtin_preset("tutorial"))->key, "AAAAAA");
  EXPECT_EQ(reg.create_room("b", builtin_preset("tutorial"))->key, "BBBBBB");
  EXPECT_EQ(next, 4u);
}

TEST(Registry, RejectsInvalidConfig) {
  asio::io_context io;
  Registry reg(io);
  auto cfg = builtin_preset("tutorial");
  cfg.rounds_per_level = 0;
  auto r = reg.create_room("host", cfg);
  ASSERT_FALSE(r);
  EXPECT_NE(r.error().front().find("E002"), std::string::npos);
  EXPECT_EQ(reg.size(), 0u);
}

TEST(Registry, HostIsFirstPlayerWithTeamName) {
  asio::io_context io;
  Registry reg(io);
  auto r = reg.create_room("host", builtin_preset("case-study"));
  ASSERT_TRUE(r);
  EXPECT_EQ(r->slot, 0);
  EXPECT_EQ(r->token.size(), 32u);
  EXPECT_FALSE(r->team_name.empty());
  EXPECT_EQ(reg.counts().lobby, 1);
  EXPECT_EQ(reg.counts().players, 1);
}

TEST(Registry, TeamNameFollowsSeed) {
  EXPECT_EQ(suggest_team_name(5), suggest_team_name(5));
  std::set<std::string> names;
  for (std::uint64_t s = 0; s < 50; ++s) names.insert(suggest_team_name(s));
  EXPECT_GT(names.size(), 30u);
}

TEST(Tokens, Are128BitHexAndDistinct) {
  RandomTokenIssuer t;
  std::set<std::string> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto tok = t.issue();
    ASSERT_EQ(tok.size(), 32u);
    EXPECT_EQ(tok.find_first_not_of("0123456789abcdef"), std::string::npos);
    seen.insert(tok);
  }
  EXPECT_EQ(seen.size(), 1000u);
}

// ---- joining ------------------------------------------------------------------

TEST(Join, RoomFullEmptyNameBadToken) {
  RoomCore room("ROOM01", preset("tutorial"), 1, quick());
  EXPECT_TRUE(room.join("a", Role::Player, nullptr));
  EXPECT_TRUE(room.join("b", Role::Player, nullptr));
  EXPECT_EQ(room.join("c", Role::Player, nullptr).error(), JoinError::RoomFull);
  EXPECT_EQ(error_message(JoinError::RoomFull), "room full");
  EXPECT_EQ(room.join("   ", Role::Player, nullptr).error(), JoinError::EmptyName);
  EXPECT_EQ(room.rejoin("feedface", nullptr).error(), JoinError::BadToken);
  EXPECT_TRUE(room.join("watcher", Role::Observer, nullptr));
}

TEST(Join, FourPlayersGetDistinctColors) {
  RoomCore room("ROOM02", preset("case-study"), 1, quick());
  auto seats = fill_room(room);
  std::set<std::string> colors;
  for (auto& s : seats) {
    const auto lobby = s.inbox.of(kLobbyState).back().payload;
    colors.insert(lobby["you"]["color"].get<std::string>());
  }
  EXPECT_EQ(colors.size(), 4u);
}

TEST(Join, PlayersCannotJoinMidGame) {
  RoomCore room("ROOM03", preset("tutorial"), 1, quick());
  Inbox host;
  auto h = room.join("host", Role::Player, host.fn());
  Sender(room, h->member).send(kStart);
  EXPECT_EQ(room.join("late", Role::Player, nullptr).error(), JoinError::NotInLobby);
}

TEST(Join, ObserverMidGameGetsSnapshotAndCannotAct) {
  RoomCore room("ROOM04", preset("case-study"), 1, quick());
  auto seats = fill_room(room);
  Sender(room, seats[0].member).send(kStart);
  for (int i = 0; i < 30; ++i) room.advance();
  Inbox obs;
  auto o = room.join("experimenter", Role::Observer, obs.fn());
  ASSERT_TRUE(o);
  const auto got = obs.all();
  ASSERT_GE(got.size(), 2u);
  EXPECT_EQ(got[0].type, kLobbyState);
  EXPECT_EQ(got[1].type, kGameSnapshot);
  EXPECT_EQ(got[1].payload["digest"], state_digest(*room.game()));

  const auto digest = state_digest(*room.game());
  Sender os(room, o->member);
  const auto seq = os.send(kPlace, {{"cell", {4, 4}}, {"tower_type", "BASIC"}});
  const auto err = obs.all().back();
  EXPECT_EQ(err.type, kError);
  EXPECT_EQ(err.payload["ack"], seq);
  EXPECT_EQ(err.payload["code"], "observer_forbidden");
  os.send(kChat, {{"text", "hi"}});
  EXPECT_EQ(obs.all().back().payload["code"], "observer_forbidden");
  EXPECT_EQ(state_digest(*room.game()), digest);
}

TEST(Join, RejoinRestoresSlotAndColor) {
  RoomCore room("ROOM05", preset("case-study"), 1, quick());
  auto seats = fill_room(room);
  Sender(room, seats[0].member).send(kStart);
  for (int i = 0; i < 5; ++i) room.advance();
  const auto before = seats[2].inbox.of(kLobbyState).back().payload["you"];
  room.disconnect(seats[2].member);
  for (int i = 0; i < 40; ++i) room.advance();  // round continues without them
  EXPECT_FALSE(room.members()[static_cast<std::size_t>(seats[2].member)].connected);
  for (int k = 0; k < 2; ++k) {
    Inbox again;
    auto r = room.rejoin(before["token"].get<std::string>(), again.fn());
    ASSERT_TRUE(r);
    EXPECT_EQ(r->member, seats[2].member);
    EXPECT_EQ(r->slot, before["slot"].get<int>());
    EXPECT_EQ(r->color, before["color"].get<std::string>());
    const auto got = again.all();
    ASSERT_EQ(got.size(), 2u);
    EXPECT_EQ(got[1].type, kGameSnapshot);
    // Sequence numbers continue where the old connection stopped.
    EXPECT_EQ(got[0].seq, seats[2].inbox.all().back().seq + 1);
    if (k == 0) seats[2].inbox.messages->insert(seats[2].inbox.messages->end(), got.begin(), got.end());
  }
}

// ---- intents ------------------------------------------------------------------

TEST(Intents, ChatRelayedToEveryMember) {
  RoomCore room("ROOM06", preset("case-study"), 1, quick());
  auto seats = fill_room(room);
  Inbox obs;
  room.join("experimenter", Role::Observer, obs.fn());
  const auto seq = Sender(room, seats[1].member).send(kChat, {{"text", "gogogo"}});
  int relayed = 0;
  for (auto* in : {&seats[0].inbox, &seats[1].inbox, &seats[2].inbox, &seats[3].inbox, &obs}) {
    const auto c = in->of(kChatRelay);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].payload["text"], "gogogo");
    EXPECT_EQ(c[0].payload["name"], "player1");
    relayed += 1;
  }
  EXPECT_EQ(relayed, 5);
  EXPECT_EQ(seats[1].inbox.of(kChatRelay)[0].payload["ack"], seq);
  EXPECT_FALSE(seats[0].inbox.of(kChatRelay)[0].payload.contains("ack"));
}

TEST(Intents, ChatDisabledByConfig) {
  auto c = builtin_preset("tutorial");
  c.comm.text_chat = false;
  RoomCore room("ROOM07", std::make_shared<const SessionConfig>(c), 1, quick());
  Inbox in;
  auto m = room.join("a", Role::Player, in.fn());
  Sender(room, m->member).send(kChat, {{"text", "hello"}});
  EXPECT_EQ(in.all().back().payload["code"], "chat_disabled");
}

TEST(Intents, InsufficientFundsErrorsOnlyTheIssuer) {
  RoomCore room("ROOM08", preset("stress"), 1, quick());
  auto seats = fill_room(room);
  Sender host(room, seats[0].member);
  host.send(kStart);
  auto first = host.send(kPlace, {{"cell", {0, 0}}, {"tower_type", "MAP"}});
  EXPECT_EQ(seats[0].inbox.all().back().type, kGameDelta);
  EXPECT_EQ(seats[0].inbox.all().back().payload["ack"], first);
  const auto digest = state_digest(*room.game());
  std::vector<std::size_t> sizes;
  for (auto& s : seats) sizes.push_back(s.inbox.size());
  auto second = host.send(kPlace, {{"cell", {2, 0}}, {"tower_type", "MAP"}});
  const auto err = seats[0].inbox.all().back();
  EXPECT_EQ(err.type, kError);
  EXPECT_EQ(err.payload["ack"], second);
  EXPECT_EQ(err.payload["code"], "insufficient_funds");
  EXPECT_EQ(seats[0].inbox.size(), sizes[0] + 1);
  for (std::size_t i = 1; i < seats.size(); ++i) EXPECT_EQ(seats[i].inbox.size(), sizes[i]);
  EXPECT_EQ(state_digest(*room.game()), digest);
}

TEST(Intents, SameCellGoesToFirstArrival) {
  RoomCore room("ROOM09", preset("tutorial"), 1, quick());
  auto seats = fill_room(room);
  Sender a(room, seats[0].member), b(room, seats[1].member);
  a.send(kStart);
  const json place{{"cell", {2, 2}}, {"tower_type", "BASIC"}};
  const auto sb = b.send(kPlace, place);
  const auto sa = a.send(kPlace, place);
  EXPECT_EQ(seats[1].inbox.all().back().type, kGameDelta);
  EXPECT_EQ(seats[1].inbox.all().back().payload["ack"], sb);
  EXPECT_EQ(seats[0].inbox.all().back().type, kError);
  EXPECT_EQ(seats[0].inbox.all().back().payload["ack"], sa);
  EXPECT_EQ(seats[0].inbox.all().back().payload["code"], "cell_occupied");
  EXPECT_EQ(room.game()->tower_at({2, 2})->owner, 1);
}

TEST(Intents, EveryIntentIsAnswered) {
  RoomCore room("ROOM10", preset("stress"), 1, quick());
  auto seats = fill_room(room);
  Sender host(room, seats[0].member);
  host.send(kStart);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    const auto c = random_command(*room.game(), rng);
    const int slot = c.issuer;
    Sender s(room, seats[static_cast<std::size_t>(slot)].member, 1000 + i);
    const auto seq = s.command(c);
    const auto last = seats[static_cast<std::size_t>(slot)].inbox.all().back();
    ASSERT_TRUE(last.payload.contains("ack"));
    EXPECT_EQ(last.payload["ack"], seq);
    EXPECT_TRUE(last.type == kGameDelta || last.type == kError);
    if (room.game()->phase == Phase::Ended) break;
    room.advance();
  }
}

TEST(Intents, MiscAnswers) {
  RoomCore room("ROOM11", preset("tutorial"), 1, quick());
  auto seats = fill_room(room);
  Sender host(room, seats[0].member), guest(room, seats[1].member);
  auto p = guest.send(kPing);
  EXPECT_EQ(seats[1].inbox.all().back().type, kGameDelta);
  EXPECT_EQ(seats[1].inbox.all().back().payload["ack"], p);
  guest.send(kStart);
  EXPECT_EQ(seats[1].inbox.all().back().payload["code"], "not_host");
  guest.send(kPlace, {{"cell", {2, 2}}, {"tower_type", "BASIC"}});
  EXPECT_EQ(seats[1].inbox.all().back().payload["code"], "not_in_game");
  guest.send("DANCE");
  EXPECT_EQ(seats[1].inbox.all().back().payload["code"], "unknown_type");
  guest.send(kJoin, {{"name", "again"}});
  EXPECT_EQ(seats[1].inbox.all().back().payload["code"], "already_joined");
  room.malformed(seats[1].member, "not JSON");
  EXPECT_EQ(seats[1].inbox.all().back().payload["code"], "bad_message");

  guest.send(kSetTeamName, {{"text", "  The Planners  "}});
  EXPECT_EQ(room.team_name(), "The Planners");
  EXPECT_EQ(seats[0].inbox.all().back().payload["team_name"], "The Planners");
  guest.send(kSetTeamName, {{"text", ""}});
  EXPECT_EQ(seats[1].inbox.all().back().payload["code"], "invalid_payload");

  host.send(kStart);
  host.send(kPlace, {{"cell", {2, 2}}, {"tower_type", "SNIPER"}});
  EXPECT_EQ(seats[0].inbox.all().back().payload["code"], "spec_not_assigned");
  host.send(kPlace, {{"cell", {2, 2}}, {"tower_type", "NOPE"}});
  EXPECT_EQ(seats[0].inbox.all().back().payload["code"], "unknown_spec");
  host.send(kPlace, {{"cell", {2, 2}}});
  EXPECT_EQ(seats[0].inbox.all().back().payload["code"], "invalid_payload");
}

TEST(Intents, AttackPhaseEditsRejectedWhenInteractionOff) {
  RoomCore room("ROOM12", preset("case-study"), 1, quick());
  auto seats = fill_room(room);
  Sender host(room, seats[0].member);
  host.send(kStart);
  for (auto& s : seats) Sender(room, s.member, 100).send(kReady);
  ASSERT_EQ(room.game()->phase, Phase::Attack);
  host.send(kPlace, {{"cell", {4, 4}}, {"tower_type", "BASIC"}});
  EXPECT_EQ(seats[0].inbox.all().back().payload["code"], "phase_violation");
}

// ---- round loop ---------------------------------------------------------------

TEST(RoundLoop, CaseStudyProducesNineResults) {
  RoomCore room("ROOM13", preset("case-study"), 1, quick());
  auto seats = fill_room(room);
  Inbox obs;
  room.join("experimenter", Role::Observer, obs.fn());
  const auto results = drive_rounds(room, seats);
  EXPECT_EQ(room.phase(), SessionPhase::Finished);
  ASSERT_EQ(results.size(), 9u);
  for (int i = 0; i < 9; ++i) {
    EXPECT_EQ(results[static_cast<std::size_t>(i)]["level"], i / 3);
    EXPECT_EQ(results[static_cast<std::size_t>(i)]["round"], i % 3);
  }
  EXPECT_EQ(obs.of(kRoundResult).size(), 9u);
  EXPECT_EQ(obs.of(kLeaderboard).size(), 9u);
  EXPECT_EQ(room.leaderboard().size(), 9u);
  for (auto& s : seats) EXPECT_TRUE(gapless(s.inbox.all()));
  EXPECT_TRUE(gapless(obs.all()));
  EXPECT_EQ(obs.all().back().payload["session_phase"], "FINISHED");
}

TEST(RoundLoop, LeaderboardScoresMatchTheSim) {
  RoomCore room("ROOM14", preset("case-study"), 1, quick());
  auto seats = fill_room(room);
  const auto results = drive_rounds(room, seats, 3);
  ASSERT_EQ(results.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& e = room.leaderboard()[i];
    EXPECT_DOUBLE_EQ(breakdown_score(room.config()->score, e), e.score);
    EXPECT_DOUBLE_EQ(results[i]["score"].get<double>(), e.score);
    EXPECT_EQ(results[i]["breakdown"]["unspent"], e.unspent);
  }
  const auto board = seats[0].inbox.of(kLeaderboard).back().payload["entries"];
  ASSERT_EQ(board.size(), 3u);
  EXPECT_GE(board[0]["score"].get<double>(), board[1]["score"].get<double>());
}

TEST(RoundLoop, UnanimousReadyStartsAttackEarly) {
  RoomCore room("ROOM15", preset("case-study", 300), 1, quick());
  auto seats = fill_room(room);
  Sender(room, seats[0].member).send(kStart);
  for (int i = 0; i < 12 * kTickRate; ++i) room.advance();
  for (std::size_t i = 0; i + 1 < seats.size(); ++i) Sender(room, seats[i].member, 50).send(kReady);
  EXPECT_EQ(room.game()->phase, Phase::Planning);
  EXPECT_NEAR(room.game()->planning_remaining(), 288.0, 1e-9);
  Sender(room, seats.back().member, 50).send(kReady);
  EXPECT_EQ(room.game()->phase, Phase::Attack);
  const auto delta = seats[0].inbox.of(kGameDelta).back().payload;
  EXPECT_EQ(delta["phase"], "ATTACK");
  EXPECT_EQ(delta["events"].back()["kind"], "PHASE_CHANGED");
}

TEST(RoundLoop, TimerExpiryStartsAttackOnTime) {
  RoomCore room("ROOM16", preset("tutorial"), 1, quick());
  auto seats = fill_room(room);
  Sender(room, seats[0].member).send(kStart);
  int ticks = 0;
  while (room.game()->phase == Phase::Planning) {
    room.advance();
    ++ticks;
  }
  EXPECT_EQ(ticks, static_cast<int>(room.config()->levels[0].planning_seconds * kTickRate));
  // Countdown went out once per second.
  int countdowns = 0;
  for (const auto& d : seats[1].inbox.of(kGameDelta)) countdowns += d.payload["phase"] == "PLANNING";
  EXPECT_EQ(countdowns, static_cast<int>(room.config()->levels[0].planning_seconds) - 1);
}

TEST(RoundLoop, AttackDeltasAtTenHertzAndPeriodicSnapshots) {
  RoomCore room("ROOM17", preset("case-study"), 1, quick());
  auto seats = fill_room(room);
  Sender(room, seats[0].member).send(kStart);
  for (auto& s : seats) Sender(room, s.member, 10).send(kReady);
  seats[3].inbox.clear();
  for (int i = 0; i < 200; ++i) room.advance();
  ASSERT_EQ(room.game()->phase, Phase::Attack);
  EXPECT_EQ(seats[3].inbox.of(kGameDelta).size(), 100u);
  EXPECT_EQ(seats[3].inbox.of(kGameSnapshot).size(), 2u);
}

TEST(RoundLoop, PlanningTimerPausesOnlyWhenConfigured) {
  for (bool pause : {false, true}) {
    auto c = builtin_preset("tutorial");
    c.pause_planning_when_empty = pause;
    RoomCore room("ROOM18", std::make_shared<const SessionConfig>(c), 1, quick());
    auto seats = fill_room(room);
    Sender(room, seats[0].member).send(kStart);
    const auto before = room.game()->planning_ticks_remaining;
    for (auto& s : seats) room.disconnect(s.member);
    for (int i = 0; i < 100; ++i) room.advance();
    EXPECT_EQ(room.game()->planning_ticks_remaining, pause ? before : before - 100);
  }
}

TEST(RoundLoop, IntentLogReplayReproducesDigests) {
  RoomCore room("ROOM19", preset("stress"), 1, quick());
  auto seats = fill_room(room);
  Sender host(room, seats[0].member);
  host.send(kStart);
  std::mt19937_64 rng(77);
  while (room.phase() == SessionPhase::InGame) {
    if (rng() % 4 == 0) {
      const auto c = random_command(*room.game(), rng);
      Sender(room, seats[static_cast<std::size_t>(c.issuer)].member, 5000).command(c);
    }
    if (room.phase() == SessionPhase::InGame) room.advance();
  }
  const auto result = seats[0].inbox.of(kRoundResult).back().payload;
  auto parsed = parse_intent_log(room.intent_log().text());
  ASSERT_TRUE(parsed);
  auto rounds = replay(room.config(), *parsed);
  ASSERT_TRUE(rounds) << rounds.error();
  ASSERT_EQ(rounds->size(), 1u);
  EXPECT_TRUE(rounds->front().matches());
  EXPECT_EQ(rounds->front().replayed_digest, result["digest"]);
  EXPECT_EQ(rounds->front().replayed_event_digest, result["event_digest"]);
}

TEST(RoundLoop, ReplayDetectsTampering) {
  RoomCore room("ROOM20", preset("tutorial"), 1, quick());
  auto seats = fill_room(room);
  drive_rounds(room, seats);
  auto ops = room.intent_log().ops();
  for (auto& op : ops) {
    if (op["op"] == "cmd" && op["cmd"]["kind"] == "PLACE") {
      op["cmd"]["cell"] = json::array({0, 3});  // onto the path
      break;
    }
  }
  EXPECT_FALSE(replay(room.config(), ops));
}

TEST(RoundLoop, RoomsAreIsolated) {
  auto cfg = preset("stress");
  auto run = [&](RoomCore& room, std::vector<Seat>& seats, RoomCore* noisy, std::vector<Seat>* noisy_seats) {
    Sender(room, seats[0].member).send(kStart);
    if (noisy) Sender(*noisy, (*noisy_seats)[0].member).send(kStart);
    std::mt19937_64 rng(3);
    std::mt19937_64 junk(4);
    while (room.phase() == SessionPhase::InGame) {
      const auto c = random_command(*room.game(), rng);
      Sender(room, seats[static_cast<std::size_t>(c.issuer)].member, 900).command(c);
      if (noisy && noisy->phase() == SessionPhase::InGame) {
        noisy->malformed((*noisy_seats)[0].member, "garbage");
        Sender(*noisy, (*noisy_seats)[1].member, 900).send(kPlace, {{"cell", {int(junk() % 99), -1}}});
        if (junk() % 50 == 0) noisy->disconnect((*noisy_seats)[2].member);
        noisy->advance();
      }
      if (room.phase() == SessionPhase::InGame) room.advance();
    }
    return seats[0].inbox.of(kRoundResult).back().payload["digest"].get<std::string>();
  };
  RoomCore alone("ROOMAA", cfg, 1, quick());
  auto sa = fill_room(alone);
  const auto reference = run(alone, sa, nullptr, nullptr);
  RoomCore quiet("ROOMBB", cfg, 2, quick());
  RoomCore loud("ROOMCC", cfg, 3, quick());
  auto sq = fill_room(quiet);
  auto sl = fill_room(loud);
  EXPECT_EQ(run(quiet, sq, &loud, &sl), reference);
}

TEST(RoundLoop, TelemetryRecordsTheSession) {
  const auto dir = scratch("telemetry");
  auto sink = std::make_shared<telemetry::SessionSink>(telemetry::SinkConfig{}, "ROOM21", dir / "s.log", dir / "s.dead");
  RoomOptions o = quick();
  o.persist_dir = dir;
  {
    RoomCore room("ROOM21", preset("tutorial"), 8, o, nullptr, sink);
    auto seats = fill_room(room);
    Sender(room, seats[0].member).send(kChat, {{"text", "put a slow near the bend"}});
    drive_rounds(room, seats);
    room.close();
    std::ifstream in(dir / "s.log");
    std::stringstream ss;
    ss << in.rdbuf();
    const auto parsed = telemetry::parse_log(ss.str());
    EXPECT_TRUE(parsed.issues.empty());
    int chats = 0, buys = 0, results = 0;
    for (const auto& r : parsed.records) {
      chats += r.kind == telemetry::RecordKind::Chat;
      buys += r.kind == telemetry::RecordKind::Action && r.action == telemetry::ActionKind::Buy;
      results += r.kind == telemetry::RecordKind::System && r.event == "ROUND_RESULT";
    }
    EXPECT_EQ(chats, 1);
    EXPECT_EQ(buys, static_cast<int>(room.game()->towers.size()));
    EXPECT_EQ(results, 1);
    EXPECT_EQ(parsed.records.front().event, "SESSION");
    EXPECT_EQ(*parsed.records.front().attribute("seed"), "8");
  }
  auto board = load_leaderboard(dir / "ROOM21_leaderboard.jsonl");
  ASSERT_TRUE(board);
  EXPECT_EQ(board->size(), 1u);
  std::ifstream log(dir / "ROOM21_intents.jsonl");
  std::stringstream ss;
  ss << log.rdbuf();
  auto ops = parse_intent_log(ss.str());
  ASSERT_TRUE(ops);
  auto rounds = replay(preset("tutorial"), *ops);
  ASSERT_TRUE(rounds);
  ASSERT_EQ(rounds->size(), 1u);
  EXPECT_TRUE(rounds->front().matches());
}

// ---- leaderboard --------------------------------------------------------------

TEST(Leaderboard, TopkOrderingAndTies) {
  EXPECT_TRUE(leaderboard_topk({}, 3).empty());
  LeaderboardEntry a{"a", 1, 1, 5, 0, 0, 0, true, 10};
  LeaderboardEntry b{"b", 1, 1, 9, 0, 0, 0, true, 30};
  LeaderboardEntry c{"c", 1, 1, 9, 0, 0, 0, true, 20};
  auto top = leaderboard_topk({a, b, c}, 10);
  ASSERT_EQ(top.size(), 3u);
  EXPECT_EQ(top[0].team_name, "c");
  EXPECT_EQ(top[1].team_name, "b");
  EXPECT_EQ(top[2].team_name, "a");
  EXPECT_EQ(leaderboard_topk({a, b, c}, 1).size(), 1u);
}

TEST(Leaderboard, PersistenceRoundTrip) {
  const auto dir = scratch("board");
  const auto file = dir / "board.jsonl";
  std::vector<LeaderboardEntry> entries;
  std::mt19937_64 rng(12);
  for (int i = 0; i < 50; ++i) {
    LeaderboardEntry e{"team " + std::to_string(i), 1 + int(rng() % 3), 1 + int(rng() % 3), double(rng() % 10000) / 4,
                       int(rng() % 10000), int(rng() % 500), int(rng() % 20), bool(rng() % 2),
                       1714564800000 + int(rng() % 100000)};
    entries.push_back(e);
    append_leaderboard(file, e);
  }
  auto back = load_leaderboard(file);
  ASSERT_TRUE(back);
  EXPECT_EQ(*back, entries);
  std::ofstream(file, std::ios::app) << "{oops\n";
  EXPECT_FALSE(load_leaderboard(file));
}

TEST(Leaderboard, BreakdownScoreMatchesComputeScore) {
  auto cfg = preset("case-study");
  GameState s = init_game(cfg, 0, 0);
  for (const auto& c : scripted_plan(s)) apply_command(s, c);
  run_to_end(s);
  LeaderboardEntry e{"t", 1, 1, 0, s.total_money(), s.kill_points, s.health, s.outcome == Outcome::Win, 0};
  EXPECT_DOUBLE_EQ(breakdown_score(cfg->score, e), compute_score(s, cfg->score));
  EXPECT_DOUBLE_EQ(breakdown_score({ScoreMode::Binary, 0, 0, 0}, e), 1.0);
}

// ---- HTTP routes ----------------------------------------------------------------

TEST(Http, HealthAndRoomCreation) {
  asio::io_context io;
  Registry reg(io);
  ServerOptions so;
  auto h = handle_http("GET", "/healthz", "", reg, so);
  EXPECT_EQ(h.status, 200);
  EXPECT_EQ(json::parse(h.body)["rooms"], 0);

  auto r = handle_http("POST", "/rooms", R"({"host":"ana","preset":"case-study"})", reg, so);
  ASSERT_EQ(r.status, 201) << r.body;
  const auto j = json::parse(r.body);
  EXPECT_TRUE(valid_room_key(j["room"].get<std::string>()));
  EXPECT_EQ(j["slot"], 0);
  EXPECT_EQ(json::parse(handle_http("GET", "/healthz", "", reg, so).body)["lobby"], 1);

  const auto cfg = serialize_config(builtin_preset("tutorial"));
  EXPECT_EQ(handle_http("POST", "/rooms", json{{"host", "b"}, {"config", json::parse(cfg)}}.dump(), reg, so).status,
            201);
  EXPECT_EQ(handle_http("POST", "/rooms", json{{"host", "b"}, {"config", cfg}}.dump(), reg, so).status, 201);
  EXPECT_EQ(handle_http("POST", "/rooms", R"({"host":"b","preset":"nope"})", reg, so).status, 400);
  EXPECT_EQ(handle_http("POST", "/rooms", R"({"host":"","preset":"tutorial"})", reg, so).status, 400);
  EXPECT_EQ(handle_http("POST", "/rooms", R"({"host":"b"})", reg, so).status, 400);
  EXPECT_EQ(handle_http("POST", "/rooms", R"({"host":"b","config":{"levels":7}})", reg, so).status, 400);
  EXPECT_EQ(handle_http("GET", "/rooms", "", reg, so).status, 405);
  EXPECT_EQ(handle_http("GET", "/nothing", "", reg, so).status, 404);
  so.default_config = builtin_preset("tutorial");
  EXPECT_EQ(handle_http("POST", "/rooms", R"({"host":"b"})", reg, so).status, 201);
}

TEST(Http, StaticFilesStayInsideTheRoot) {
  asio::io_context io;
  Registry reg(io);
  ServerOptions so;
  so.static_dir = scratch("static");
  std::ofstream(so.static_dir / "index.html") << "<p>hi</p>";
  auto r = handle_http("GET", "/", "", reg, so);
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.content_type, "text/html");
  EXPECT_EQ(r.body, "<p>hi</p>");
  EXPECT_EQ(handle_http("GET", "/../etc/passwd", "", reg, so).status, 400);
}

// ---- sockets --------------------------------------------------------------------

TEST(Sockets, FourBotsRaceAndReplay) {
  const auto rep = protocol_integration("case-study", 4, 50.0);
  EXPECT_TRUE(rep.full_round) << rep.detail;
  EXPECT_TRUE(rep.replay_matches) << rep.broadcast_digest << " vs " << rep.replayed_digest << " " << rep.detail;
  EXPECT_TRUE(rep.gapless);
  EXPECT_EQ(rep.race_success, 1);
  EXPECT_EQ(rep.race_occupied, 1);
}

TEST(Sockets, JoinErrorsAndObserverSnapshot) {
  asio::io_context io;
  auto guard = asio::make_work_guard(io);
  RegistryOptions ro;
  ro.time_scale = 20;
  Registry reg(io, ro);
  Server server(io, reg, ServerOptions{});
  server.start();
  std::thread t([&] { io.run(); });
  const auto wait = std::chrono::milliseconds(5000);
  {
    WsClient c;
    c.connect("127.0.0.1", server.port());
    c.send(kPing, json::object());
    EXPECT_EQ(c.wait_for(kError, wait)->payload["code"], "not_joined");
    c.send(kJoin, {{"name", "x"}}, "ZZZZZZ");
    EXPECT_EQ(c.wait_for(kError, wait)->payload["code"], "unknown_room");
    c.send_raw("{{{");
    EXPECT_EQ(c.wait_for(kError, wait)->payload["code"], "bad_message");

    auto created = http_create_room("127.0.0.1", server.port(), {{"host", "h"}, {"preset", "tutorial"}});
    ASSERT_TRUE(created);
    c.send(kJoin, {{"name", ""}}, created->key);
    EXPECT_EQ(c.wait_for(kError, wait)->payload["code"], "empty_name");

    WsClient host, guest, obs;
    host.connect("127.0.0.1", server.port());
    guest.connect("127.0.0.1", server.port());
    host.send(kJoin, {{"token", created->token}}, created->key);
    guest.send(kJoin, {{"name", "g"}}, created->key);
    ASSERT_TRUE(guest.wait_for(kLobbyState, wait));
    c.send(kJoin, {{"name", "third"}}, created->key);
    auto full = c.wait_for(kError, wait);
    ASSERT_TRUE(full);
    EXPECT_EQ(full->payload["code"], "room_full");
    host.send(kStart, json::object(), created->key);
    ASSERT_TRUE(host.wait_for(kGameSnapshot, wait));

    obs.connect("127.0.0.1", server.port());
    obs.send(kJoin, {{"name", "researcher"}, {"role", "OBSERVER"}}, created->key);
    ASSERT_TRUE(obs.wait_for(kLobbyState, wait));
    auto snap = obs.next(wait);
    ASSERT_TRUE(snap);
    EXPECT_EQ(snap->type, kGameSnapshot);
    auto health = http_get_json("127.0.0.1", server.port(), "/healthz");
    ASSERT_TRUE(health);
    EXPECT_EQ((*health)["in_game"], 1);
    EXPECT_EQ((*health)["observers"], 1);
  }
  reg.shutdown();
  server.stop();
  guard.reset();
  io.stop();
  t.join();
}
