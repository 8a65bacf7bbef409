// maxreglab <command> [--config <path>] [--out <dir>] [--seed <int>] [--format json|csv|text]
//
// Exit status: 0 all checks pass, 1 a check failed, 2 usage or configuration error.

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "maxreg/config.hpp"
#include "maxreg/error.hpp"
#include "maxreg/lab.hpp"
#include "maxreg/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Experiments on non-autonomous forms without maximal regularity", "maxreglab"};
  std::string command;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string format = "text";

  std::string names;
  for (const auto& c : maxreg::lab_commands()) names += (names.empty() ? "" : ", ") + c;
  app.add_option("command", command, "one of: " + names)->required();
  app.add_option("--config", config_path, "key = value config file (defaults when omitted)");
  app.add_option("--out", out_dir, "output directory (stdout when omitted)");
  app.add_option("--seed", seed, "overrides the config seed");
  app.add_option("--format", format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
  CLI11_PARSE(app, argc, argv);

  try {
    maxreg::ExperimentConfig cfg = config_path.empty() ? maxreg::ExperimentConfig{} : maxreg::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    cfg.validate();
    const auto fmt = maxreg::parse_format(format);

    const auto& cmds = maxreg::lab_commands();
    if (std::find(cmds.begin(), cmds.end(), command) == cmds.end()) {
      std::cerr << "maxreglab: unknown command '" << command << "' (expected " << names << ")\n";
      return 2;
    }
    const maxreg::Report report = maxreg::run(command, cfg);
    if (cfg.out_dir.empty()) {
      std::cout << maxreg::render(report, fmt);
    } else {
      for (const auto& p : maxreg::emit(report, fmt, cfg.out_dir)) std::cerr << "wrote " << p.string() << "\n";
      std::cerr << (report.passed() ? "PASS" : "FAIL") << "\n";
    }
    return report.passed() ? 0 : 1;
  } catch (const maxreg::ConfigError& e) {
    std::cerr << "maxreglab: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "maxreglab: " << e.what() << "\n";
    return 1;
  }
}
