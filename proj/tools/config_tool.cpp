#include <CLI11.hpp>

#include <iostream>

#include "taskforge/config/config.hpp"
#include "tool_util.hpp"

using namespace taskforge;

int main(int argc, char** argv) {
  CLI::App app{"Session config presets, validation and the design checklist"};
  app.require_subcommand(1);

  auto* presets = app.add_subcommand("presets", "list the built-in presets");
  std::string preset_name;
  auto* preset = app.add_subcommand("preset", "print a built-in preset as a config document");
  preset->add_option("name", preset_name)->required();
  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "parse and validate a config document");
  validate->add_option("config", validate_path, "file or preset:NAME")->required();
  std::string checklist_path;
  auto* checklist = app.add_subcommand("checklist", "answer the ten design questions for a config");
  checklist->add_option("config", checklist_path, "file or preset:NAME")->required();
  CLI11_PARSE(app, argc, argv);

  try {
    if (*presets) {
      for (const auto& n : preset_names()) std::cout << n << "\n";
    } else if (*preset) {
      std::cout << serialize_config(tools::load_config("preset:" + preset_name));
    } else if (*validate) {
      const auto cfg = tools::load_config(validate_path);
      const auto issues = validate_config(cfg);
      for (const auto& i : issues) std::cout << i.to_string() << "\n";
      if (!issues.empty()) return 1;
      std::cout << "ok\n";
    } else if (*checklist) {
      const auto cfg = tools::load_config(checklist_path);
      if (auto issues = validate_config(cfg); !issues.empty()) {
        for (const auto& i : issues) std::cerr << i.to_string() << "\n";
        return 1;
      }
      const auto a = checklist_report(cfg);
      const std::string* answers[] = {&a.q1, &a.q2, &a.q3, &a.q4, &a.q5, &a.q6, &a.q7, &a.q8, &a.q9, &a.q10};
      for (int i = 0; i < 10; ++i) std::cout << "q" << (i + 1) << ": " << *answers[i] << "\n";
    }
  } catch (const tools::Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return 2;
  }
  return 0;
}
