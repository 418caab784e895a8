#include <CLI11.hpp>

#include <iostream>

#include "config.hpp"
#include "experiments.hpp"

int main(int argc, char** argv) {
  using namespace owlab::cli;

  CLI::App app{"owlab: operator-weighted dyadic experiments"};
  std::string experiment, config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  int threads = 1;

  std::string names;
  for (const auto& n : experiment_names()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("experiment", experiment, "one of: " + names)->required();
  app.add_option("--config", config_path, "keyed-text config file")->required();
  auto* seed_opt = app.add_option("--seed", seed, "master seed (default 0xA9 or run.seed)");
  auto* out_opt = app.add_option("--out", out_dir, "output directory (default . or run.out)");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  Config cfg;
  try {
    cfg = Config::load(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  }
  RunOptions opts;
  if (*seed_opt) opts.seed = seed;
  if (*out_opt) opts.out_dir = out_dir;
  if (*threads_opt) opts.threads = threads;
  return run_experiment(experiment, cfg, opts, std::cerr);
}
