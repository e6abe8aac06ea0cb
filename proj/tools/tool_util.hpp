#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "taskforge/config/config.hpp"

namespace taskforge::tools {

struct Failure {
  std::string message;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{"cannot read " + path};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// A config document path, or "preset:NAME".
inline SessionConfig load_config(const std::string& spec) {
  if (spec.rfind("preset:", 0) == 0) {
    try {
      return builtin_preset(spec.substr(7));
    } catch (const std::invalid_argument& e) {
      throw Failure{e.what()};
    }
  }
  auto parsed = parse_config(read_file(spec));
  if (!parsed) {
    std::string msg = spec + ": invalid config";
    for (const auto& i : parsed.error()) msg += "\n  " + i.to_string();
    throw Failure{msg};
  }
  return std::move(*parsed);
}

/// "host:port"
inline std::pair<std::string, unsigned short> split_address(const std::string& s) {
  const auto colon = s.rfind(':');
  if (colon == std::string::npos) throw Failure{"address must be host:port: " + s};
  try {
    const int port = std::stoi(s.substr(colon + 1));
    if (port < 0 || port > 65535) throw std::out_of_range("port");
    return {s.substr(0, colon), static_cast<unsigned short>(port)};
  } catch (const std::logic_error&) {
    throw Failure{"bad port in " + s};
  }
}

}  // namespace taskforge::tools
