#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cwlab/errors.hpp"
#include "cwlab/experiments.hpp"
#include "cwlab/scenario.hpp"

namespace {

int report(const std::string& kind, int code, const std::string& message) {
  std::cerr << nlohmann::json{{"error", kind}, {"exit_code", code}, {"message", message}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace cwlab;
  CLI::App app{"Corner diffraction lab: ray tracing and sector wave experiments"};
  std::string command, config, out;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  app.add_option("subcommand", command, "trace | fan | limit | sector-wave | measure | calibrate")->required();
  app.add_option("--config", config, "scenario file");
  app.add_option("--out", out, "output directory (overrides output.dir)");
  app.add_option("--seed", seed, "RNG seed (overrides experiment.seed)");
  app.add_option("--set", sets, "override, section.key=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("ConfigError", exit_codes::kConfig, e.what());
  }

  try {
    const auto sub = scenario::parse_subcommand(command);
    if (config.empty()) throw ConfigError("--config is required");
    auto s = scenario::load(config, sets);
    if (!out.empty()) s.out_dir = out;
    if (seed) s.seed = *seed;
    const auto outcome = experiments::run(s, sub);
    std::cout << outcome.summary;
    for (const auto& f : outcome.files) std::cout << "wrote " << f.string() << '\n';
    return 0;
  } catch (const Error& e) {
    return report(e.kind(), e.exit_code(), e.what());
  } catch (const std::exception& e) {
    return report("InternalError", exit_codes::kInternal, e.what());
  }
}
