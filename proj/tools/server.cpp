#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <thread>

#include <boost/asio/signal_set.hpp>

#include "taskforge/server/transport.hpp"
#include "tool_util.hpp"

using namespace taskforge;
using namespace taskforge::server;

int main(int argc, char** argv) {
  CLI::App app{"Authoritative session server: HTTP, WebSocket at /ws"};
  std::string listen = "127.0.0.1:8080";
  std::string config;
  std::string log_sink;
  std::string persist;
  std::string static_dir;
  double time_scale = 1.0;
  double intermission = 10.0;
  unsigned threads = 2;
  app.add_option("--listen", listen, "host:port; port 0 picks a free one");
  app.add_option("--config", config, "default config for new rooms: file or preset:NAME");
  app.add_option("--log-sink", log_sink, "telemetry endpoint base URL; records go to {url}/log");
  app.add_option("--persist", persist, "directory for session logs, intent logs and leaderboards");
  app.add_option("--static", static_dir, "directory served for plain GET requests");
  app.add_option("--time-scale", time_scale, "sim speed multiplier")->check(CLI::PositiveNumber);
  app.add_option("--intermission", intermission, "seconds between rounds")->check(CLI::NonNegativeNumber);
  app.add_option("--threads", threads, "I/O threads")->check(CLI::Range(1u, 64u));
  CLI11_PARSE(app, argc, argv);

  try {
    const auto [host, port] = tools::split_address(listen);
    ServerOptions so;
    so.address = host;
    so.port = port;
    so.static_dir = static_dir;
    if (!config.empty()) so.default_config = tools::load_config(config);

    RegistryOptions ro;
    ro.time_scale = time_scale;
    ro.log_sink = log_sink;
    ro.room.persist_dir = persist;
    ro.room.intermission_seconds = intermission;

    asio::io_context io;
    Registry registry(io, ro);
    Server server(io, registry, so);
    server.start();
    std::cout << "listening on " << host << ":" << server.port() << std::endl;

    asio::signal_set signals(io, SIGINT, SIGTERM);
    std::thread closer;
    signals.async_wait([&](const boost::system::error_code&, int) {
      server.stop();
      closer = std::thread([&] {
        registry.shutdown();
        io.stop();
      });
    });
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back([&] { io.run(); });
    io.run();
    for (auto& t : pool) t.join();
    if (closer.joinable()) closer.join();
  } catch (const tools::Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
