#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ria {

inline constexpr int kSchemaVersion = 1;

struct PipelineConfig {
  std::vector<std::string> inputs;
  std::vector<double> thresholds = {-5, -4, -3, -2, 2, 3, 4, 5};
  int n_bootstrap = 1000;
  std::uint64_t seed = 0;
  bool seed_set = false;  // seed is mandatory; reproducibility contract
  bool keep_overnight = false;
  bool reset_sessions = false;
  std::string output_dir;
  std::int64_t delta_t = 10;
  int bins_per_decade = 10;

  void validate() const;
};

// Plain key=value config file ('#' comments); flags override afterwards.
PipelineConfig parse_config_file(const std::string& path);

struct StageFailure {
  std::string instrument;
  std::string stage;
  std::string message;
};

// Runs every stage for every input, writes all output files plus a manifest
// recording config, seed, and per-file checksums. Returns the stage failures
// (empty on full success); partial outputs are retained.
std::vector<StageFailure> run_pipeline(const PipelineConfig& config);

}  // namespace ria
