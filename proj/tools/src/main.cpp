#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "vvkrr/cli/commands.hpp"
#include "vvkrr/textio.hpp"

namespace {

using vvkrr::cli::ExitCode;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::size_t workers_from_env() {
  const char* env = std::getenv("VVKRR_WORKERS");
  if (env == nullptr || *env == '\0') return 0;
  const long long n = vvkrr::text::parse_integer(env);
  if (n < 0) throw std::invalid_argument("VVKRR_WORKERS must be >= 0");
  return static_cast<std::size_t>(n);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vector-valued kernel ridge regression rate experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", VVKRR_VERSION_STRING);

  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<std::size_t> workers;
  bool quiet = false;

  const std::pair<const char*, const char*> commands[] = {
      {"run-rates", "Learning-rate experiment; exit 0 iff the fitted slope matches theory"},
      {"bias-check", "Exact bias against the bound B^2 lambda^(beta - gamma) on a lambda grid"},
      {"edim", "Effective dimension N(lambda) and the N(lambda) lambda^p certificate"},
      {"lower-bound-demo", "Projection inequality trials and the KL identity table"},
      {"sobolev-demo", "Matern kernel rate with Nystrom decay estimate"},
      {"check-config", "Validate a config and print its canonical form"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "Config file (key = value with [section] headers)");
    sub->add_option("--set", sets, "Override, e.g. --set target.beta=2 (repeatable)");
    sub->add_option("--seed", seed, "Master seed (experiment.master_seed)");
    sub->add_option("-o,--output-dir", output_dir, "Artifact directory (experiment.output_dir)");
    sub->add_option("-j,--workers", workers, "Worker threads; 0 = all cores (env VVKRR_WORKERS)");
    sub->add_flag("-q,--quiet", quiet, "Suppress tables on stdout");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : ExitCode::kUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  vvkrr::cli::ExperimentConfig config;
  try {
    std::vector<vvkrr::cli::Override> overrides;
    for (const auto& s : sets) overrides.push_back(vvkrr::cli::parse_override(s));
    if (seed) overrides.emplace_back("experiment.master_seed", std::to_string(*seed));
    if (output_dir) overrides.emplace_back("experiment.output_dir", *output_dir);
    config = vvkrr::cli::parse_config(config_path.empty() ? std::string() : read_file(config_path), overrides);
  } catch (const std::exception& e) {
    std::cerr << "vvkrr: " << e.what() << '\n';
    return ExitCode::kUsage;
  }

  try {
    vvkrr::cli::RunOptions options;
    options.workers = workers ? *workers : workers_from_env();
    options.log = quiet ? nullptr : &std::cout;
    if (command == "check-config") {
      std::cout << vvkrr::cli::echo_config(config);
      return ExitCode::kPass;
    }
    if (command == "run-rates") return vvkrr::cli::cmd_run_rates(config, options);
    if (command == "bias-check") return vvkrr::cli::cmd_bias_check(config, options);
    if (command == "edim") return vvkrr::cli::cmd_edim(config, options);
    if (command == "lower-bound-demo") return vvkrr::cli::cmd_lower_bound_demo(config, options);
    if (command == "sobolev-demo") return vvkrr::cli::cmd_sobolev_demo(config, options);
  } catch (const std::exception& e) {
    std::cerr << "vvkrr " << command << ": " << e.what() << '\n';
    return ExitCode::kRuntime;
  }
  return ExitCode::kUsage;
}
