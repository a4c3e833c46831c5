#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "binrec/cli/config.hpp"
#include "binrec/cli/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Binary function recovery from blurred, noisy data by phase-field relaxation"};
  app.set_version_flag("--version", std::string(BINREC_VERSION));

  std::string command;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("command", command, "synthesize | recover | sweep | compare | oracle-check")
      ->required()
      ->check(CLI::IsMember({"synthesize", "recover", "sweep", "compare", "oracle-check"}));
  app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides the config's 'out')");
  app.add_option("--seed", seed, "noise / instance seed (overrides the config's 'seed')");
  CLI11_PARSE(app, argc, argv);

  using namespace binrec::cli;
  try {
    const Command cmd = parse_command(command);
    if (config_path.empty() && cmd != Command::OracleCheck) {
      std::cerr << "error: --config is required for " << command << '\n';
      return 2;
    }
    RunConfig config = config_path.empty() ? parse_config("", {}, cmd) : load_config(config_path, cmd);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (seed) config.seed = *seed;

    const RunOutcome outcome = run(config, std::cout);
    for (const auto& f : outcome.files) std::cout << "wrote " << f.string() << '\n';
    if (outcome.exit_code != 0) std::cerr << "error: " << outcome.error << '\n';
    return outcome.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
}
