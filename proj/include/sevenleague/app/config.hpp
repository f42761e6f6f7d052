#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sevenleague/compression/compression.hpp"
#include "sevenleague/dataset/param_space.hpp"
#include "sevenleague/nn/trainer.hpp"

namespace sl {

struct SampleSettings {
  std::map<std::string, double> theta;
  std::size_t n_per_pair = 1;
};

struct HeatmapSettings {
  double mu = 0.04;
  double a = 0.5;
  double level = 0.95;
  std::vector<double> sigma;
  std::vector<double> dt;
  std::size_t n = 20'000;
  /// Cells with sigma or dt below these are reported as boundary cells.
  double small_sigma = 0.1;
  double small_dt = 0.2;
};

struct ValidateAbmSettings {
  std::map<std::string, double> theta{{"mu", 0.04}, {"sigma", 0.3}, {"dt", 1.0}};
  std::vector<double> a{0.8, 0.9, 1.0, 1.1};
  std::vector<double> b_levels{0.35, 0.55, 0.75, 0.95};
  std::size_t n = 100'000;
  double tolerance = 0.01;
  HeatmapSettings heatmap;
};

struct HestonSettings {
  std::string set = "I";
  std::size_t n = 100'000;
  double delta = 0.01;
  double tolerance = 0.008;
  double min_speedup = 2.0;
};

struct SabrSettings {
  double alpha = 0.3;
  double dt = 1.0;
  double sigma0 = 1.0;
  std::vector<double> levels{0.05, 0.35, 0.65, 0.95};
  std::size_t n = 100'000;
  std::size_t oracle_paths = 4'000'000;
  std::size_t oracle_neighbors = 10'000;
  int oracle_steps = 100;
  double tolerance = 0.015;
};

/// Everything a command needs, resolved from presets, the config file and flags.
struct RunConfig {
  std::string preset = "desk";
  ParamSpace space;
  GridConfig grid;
  TrainConfig train;
  std::vector<int> hidden{50, 50, 50, 50};
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::filesystem::path out_dir = "out";
  SampleSettings sample;
  ValidateAbmSettings validate_abm;
  HestonSettings heston;
  SabrSettings sabr;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Presets: "desk" (100 LHS x 20 dt), "full" (full training-set counts) and "sabr"
/// (driftless GBM, square transform, inputs sigma and dt).
RunConfig default_run_config(Family family, const std::string& preset = "desk");

/// Reads {"family", "preset", "space", "grid", "train", "hidden", "seed", "threads",
/// "out", "sample", "validate_abm", "heston", "sabr"}; every key but "family" is
/// optional and unknown keys are rejected. Throws ConfigError.
RunConfig run_config_from_json(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::json to_json(const RunConfig& cfg);

/// Writes <out_dir>/<command>.config.json and returns its path.
std::filesystem::path write_resolved_config(const RunConfig& cfg, const std::string& command);

}  // namespace sl
