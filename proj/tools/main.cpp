// shiftconc: batch driver. One command per process; the JSON report goes to
// --out (or stdout) and CSV tables land beside it.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "shiftconc/app/runner.hpp"

int main(int argc, char** argv) {
  namespace app = shiftconc::app;

  CLI::App cli{"Concentration of additive functions on shifted primes: batch experiments"};
  cli.set_version_flag("--version", shiftconc::kVersion);

  std::string command;
  std::string config_path;
  std::string out_path;
  app::RunOptions options;
  std::uint64_t seed = 0;

  cli.add_option("command", command, "Command to run")
      ->required()
      ->check(CLI::IsMember(app::command_names()));
  cli.add_option("--config", config_path, "Experiment config (INI, or a previous JSON report)");
  cli.add_option("--cache-dir", options.cache_dir,
                 std::string("Factor table cache directory (default: $") + shiftconc::kCacheDirEnv + ")");
  cli.add_option("--limit", options.min_limit, "Minimum factor table limit");
  cli.add_option("--out", out_path, "Report path; CSV tables are written beside it");
  cli.add_option("--threads", options.threads, "Worker threads, 0 = auto")->default_val(1);
  auto* seed_opt = cli.add_option("--seed", seed, "Seed for randomized h probes");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return cli.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.exit(e);
    return 2;
  }
  if (*seed_opt) options.seed = seed;

  try {
    auto cfg = config_path.empty() ? app::ExperimentConfig{} : app::ExperimentConfig::from_file(config_path);
    const auto output = app::run(command, std::move(cfg), options);
    if (out_path.empty()) {
      std::cout << output.report.dump(2) << '\n';
    } else {
      app::write_outputs(output, out_path);
    }
  } catch (const shiftconc::Error& e) {
    std::cerr << "error (" << shiftconc::to_string(e.kind()) << "): " << e.what() << '\n';
    return app::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
