#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "owlab/weights.hpp"

namespace owlab::cli {

inline constexpr std::uint64_t kDefaultSeed = 0xA9;

enum ExitCode { kOk = 0, kUsage = 1, kPrecondition = 2, kNumerical = 3 };

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides run.seed
  std::optional<std::string> out_dir;  // overrides run.out
  std::optional<int> threads;          // overrides run.threads
};

const std::vector<std::string>& experiment_names();

// Builds the weight described by the weight.* keys.
WeightModel weight_from_config(const Config& cfg);

// Writes <out>/<name>.csv and <out>/<name>_summary.csv (plus extra tables for some experiments).
// Errors are reported on err and mapped to the exit codes above.
int run_experiment(const std::string& name, const Config& cfg, const RunOptions& opts, std::ostream& err);

}  // namespace owlab::cli
