// smc run <config> [--mode M] [--seed S] [--out DIR]

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "smc/config.hpp"
#include "smc/error.hpp"
#include "smc/experiment.hpp"

namespace {

int run(const std::string& path, const std::string& mode, const std::optional<std::uint64_t>& seed,
        const std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "smc: cannot read " << path << '\n';
    return 2;
  }
  std::ostringstream text;
  text << in.rdbuf();

  auto parsed = smc::parse_config(text.str());
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors) {
      std::cerr << path;
      if (e.line > 0) std::cerr << ':' << e.line;
      std::cerr << ": " << e.message << '\n';
    }
    return 2;
  }
  auto cfg = std::move(*parsed.config);

  std::optional<smc::Mode> mode_override;
  if (!mode.empty()) mode_override = smc::parse_mode(mode);
  smc::apply_overrides(cfg, mode_override, seed);

  std::filesystem::path dir = ".";
  if (!out.empty()) {
    dir = out;
  } else if (const char* env = std::getenv("SMC_OUT_DIR"); env && *env) {
    dir = env;
  } else if (cfg.experiment.output) {
    dir = *cfg.experiment.output;
  }
  return smc::run_experiment(cfg, dir, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential Monte Carlo experiments"};
  app.set_version_flag("--version", std::string(SMC_VERSION));
  app.require_subcommand(1);

  auto* cmd = app.add_subcommand("run", "Run the experiment described by a config file");
  std::string config_path, mode, out;
  std::optional<std::uint64_t> seed;
  cmd->add_option("config", config_path, "Config file")->required();
  cmd->add_option("--mode", mode, "filter | smooth | likelihood | clt-check | resample-check");
  cmd->add_option("--seed", seed, "Override experiment.seed");
  cmd->add_option("--out", out, "Output directory");

  CLI11_PARSE(app, argc, argv);
  try {
    return run(config_path, mode, seed, out);
  } catch (const smc::Error& e) {
    std::cerr << "smc: " << smc::to_string(e.code()) << ": " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "smc: " << e.what() << '\n';
    return 3;
  }
}
