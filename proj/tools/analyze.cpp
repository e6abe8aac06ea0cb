#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include "taskforge/analysis/analysis.hpp"
#include "taskforge/config/config.hpp"
#include "tool_util.hpp"

using namespace taskforge;
using namespace taskforge::analysis;

namespace {

using tools::Failure;
using tools::load_config;
using tools::read_file;

std::vector<LogRecord> load_log(const std::string& path) {
  auto parsed = telemetry::parse_log(read_file(path));
  for (const auto& issue : parsed.issues) {
    std::cerr << path << ":" << issue.line << ": skipped: " << issue.message << "\n";
  }
  return std::move(parsed.records);
}

struct Output {
  std::string out = "-";
  std::string format = "csv";

  char sep() const { return format == "tsv" ? '\t' : ','; }

  void write(const std::string& text) const {
    if (out == "-") {
      std::cout << text;
      return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw Failure{"cannot write " + out};
    f << text;
  }
};

void add_output(CLI::App* cmd, Output& o) {
  cmd->add_option("--out", o.out, "Output file, '-' for stdout; 'csv' or 'tsv' alone select the format on stdout");
  cmd->add_option("--format", o.format, "Table format")->check(CLI::IsMember({"csv", "tsv"}));
  cmd->callback([&o] {
    if (o.out == "csv" || o.out == "tsv") {
      o.format = o.out;
      o.out = "-";
    }
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Offline analysis of session logs"};
  app.require_subcommand(1);

  std::string log_path;
  std::string map_spec;
  int level = 1;
  Output heat_out;
  auto* heat = app.add_subcommand("heatmap", "Tower placement frequency per cell");
  heat->add_option("--log", log_path, "Session log")->required();
  heat->add_option("--map", map_spec, "WIDTHxHEIGHT, a config document, or preset:NAME")->required();
  heat->add_option("--level", level, "Level of the config whose map is used (1-based)");
  add_output(heat, heat_out);

  std::string config_spec;
  std::string room;
  Output spend_out;
  auto* spend = app.add_subcommand("spend", "Per-round expenditure series");
  spend->add_option("--log", log_path, "Session log")->required();
  spend->add_option("--config", config_spec, "Config document or preset:NAME")->required();
  spend->add_option("--room", room, "Room key written to the room column");
  add_output(spend, spend_out);

  std::string annotations_path;
  Output chat_out;
  auto* chat = app.add_subcommand("chat", "Utterance statistics and skill summary");
  chat->add_option("--log", log_path, "Session log")->required();
  chat->add_option("--annotations", annotations_path, "index<TAB>skill[,skill...] file");
  add_output(chat, chat_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*heat) {
      int width = 0;
      int height = 0;
      std::smatch m;
      static const std::regex dims(R"((\d+)x(\d+))");
      if (std::regex_match(map_spec, m, dims)) {
        width = std::stoi(m[1]);
        height = std::stoi(m[2]);
      } else {
        const auto cfg = load_config(map_spec);
        if (level < 1 || level > static_cast<int>(cfg.levels.size())) throw Failure{"no level " + std::to_string(level)};
        width = cfg.levels[static_cast<std::size_t>(level - 1)].map.width;
        height = cfg.levels[static_cast<std::size_t>(level - 1)].map.height;
      }
      const auto result = placement_heatmap(load_log(log_path), width, height);
      for (const auto& note : result.excluded) std::cerr << "excluded: " << note << "\n";
      heat_out.write(heatmap_table(result.heatmap, heat_out.sep()));
      std::cerr << result.buys << " BUY records on a " << width << "x" << height << " map\n";
    } else if (*spend) {
      const auto cfg = load_config(config_spec);
      const auto rounds = expenditure_series(load_log(log_path), cfg, room);
      for (const auto& r : rounds) {
        for (const auto& note : r.notes) std::cerr << "level " << r.level << " round " << r.round << ": " << note << "\n";
      }
      spend_out.write(rounds_table(rounds, spend_out.sep()));
      const bool bad = std::any_of(rounds.begin(), rounds.end(), [](const auto& r) { return r.mismatch || !r.complete; });
      return bad ? 3 : 0;
    } else if (*chat) {
      const auto records = load_log(log_path);
      const auto stats = utterance_stats(records);
      if (annotations_path.empty()) {
        chat_out.write(chat_table(stats, nullptr, chat_out.sep()));
      } else {
        auto set = parse_annotations(read_file(annotations_path));
        if (!set) {
          std::string msg = annotations_path + ": invalid annotations";
          for (const auto& i : set.error()) msg += "\n  line " + std::to_string(i.line) + ": " + i.message;
          throw Failure{msg};
        }
        auto summary = skill_summary(records, *set);
        if (!summary) throw Failure{summary.error()};
        chat_out.write(chat_table(stats, &*summary, chat_out.sep()));
      }
    }
  } catch (const Failure& f) {
    std::cerr << "analyze: " << f.message << "\n";
    return 2;
  }
  return 0;
}
