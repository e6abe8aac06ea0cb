#include <CLI11.hpp>

#include <cstdio>
#include <future>
#include <iostream>
#include <thread>

#include "taskforge/server/bot.hpp"
#include "taskforge/server/client.hpp"
#include "taskforge/server/transport.hpp"
#include "tool_util.hpp"

using namespace taskforge;
using namespace taskforge::server;

int main(int argc, char** argv) {
  CLI::App app{"Fills a room with scripted bots and plays the session to the end"};
  std::string address;
  std::string config = "preset:case-study";
  int players = 0;
  int rounds = -1;
  double reserve = 0.6;
  double time_scale = 20.0;
  bool observer = false;
  app.add_option("--server", address, "host:port of a running server; omit to start one in-process");
  app.add_option("--config", config, "file or preset:NAME");
  app.add_option("--players", players, "bots to seat; default fills every slot");
  app.add_option("--rounds", rounds, "stop after this many rounds");
  app.add_option("--reserve", reserve, "share of starting gold each bot keeps")->check(CLI::Range(0.0, 1.0));
  app.add_option("--time-scale", time_scale, "sim speed of the in-process server")->check(CLI::PositiveNumber);
  app.add_flag("--observer", observer, "also attach an observer");
  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = tools::load_config(config);
    if (players <= 0 || players > cfg.slot_count()) players = cfg.slot_count();

    asio::io_context io;
    std::optional<Registry> registry;
    std::optional<Server> server;
    std::thread io_thread;
    std::string host = "127.0.0.1";
    unsigned short port = 0;
    auto guard = asio::make_work_guard(io);
    if (address.empty()) {
      RegistryOptions ro;
      ro.time_scale = time_scale;
      ro.room.intermission_seconds = 1.0;
      registry.emplace(io, ro);
      server.emplace(io, *registry, ServerOptions{});
      server->start();
      port = server->port();
      io_thread = std::thread([&] { io.run(); });
    } else {
      std::tie(host, port) = tools::split_address(address);
    }

    auto created = http_create_room(host, port, {{"host", "bot0"}, {"config", json::parse(serialize_config(cfg))}});
    if (!created) throw tools::Failure{created.error()};
    std::cout << "room " << created->key << " team \"" << created->team_name << "\"" << std::endl;

    std::vector<std::future<BotReport>> bots;
    for (int i = 0; i < players; ++i) {
      BotOptions o;
      o.name = "bot" + std::to_string(i);
      o.reserve = reserve;
      o.max_rounds = rounds;
      if (i == 0) {
        o.token = created->token;
        o.start = true;
        o.wait_players = players;
      }
      bots.push_back(std::async(std::launch::async, run_bot, host, port, created->key, o));
    }
    std::future<BotReport> watcher;
    if (observer) {
      BotOptions o;
      o.name = "observer";
      o.role = Role::Observer;
      o.max_rounds = rounds;
      watcher = std::async(std::launch::async, run_bot, host, port, created->key, o);
    }

    int failures = 0;
    std::vector<BotReport> reports;
    for (auto& b : bots) reports.push_back(b.get());
    for (const auto& r : reports) {
      if (!r.error.empty()) {
        std::cerr << "bot in slot " << (r.slot ? std::to_string(*r.slot) : "?") << ": " << r.error << "\n";
        ++failures;
      }
    }
    for (const auto& res : reports.front().results) {
      std::printf("level %d round %d  %-4s score %.0f  unspent %lld  points %lld  health %lld  digest %s\n",
                  res["level"].get<int>() + 1, res["round"].get<int>() + 1, res["outcome"].get<std::string>().c_str(),
                  res["score"].get<double>(), res["breakdown"]["unspent"].get<long long>(),
                  res["breakdown"]["points"].get<long long>(), res["breakdown"]["health"].get<long long>(),
                  res["digest"].get<std::string>().c_str());
    }
    int accepted = 0, rejected = 0;
    for (const auto& r : reports) {
      accepted += r.accepted;
      rejected += r.rejected;
    }
    std::printf("intents accepted %d, rejected %d\n", accepted, rejected);
    if (observer) {
      auto w = watcher.get();
      std::printf("observer saw %zu messages, %d round results\n", w.received.size(), w.rounds);
    }

    if (registry) {
      registry->shutdown();
      server->stop();
      guard.reset();
      io.stop();
      io_thread.join();
    }
    return failures == 0 ? 0 : 1;
  } catch (const tools::Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return 2;
  }
}
