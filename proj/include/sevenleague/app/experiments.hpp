#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sevenleague/app/config.hpp"
#include "sevenleague/finance/heston.hpp"
#include "sevenleague/sampler/bridge_sampler.hpp"

namespace sl {

struct AbmCell {
  double a = 0, b = 0, level = 0;
  double error = 0;     // sup-CDF distance to the analytic bridge-integral law
  double wall_ms = 0;   // sampling time for this cell
  bool extrapolated = false;
  std::vector<double> samples;
};

/// The (a, b) error table at theta: b is the level-quantile of Y(dt) | Y(0) = a.
std::vector<AbmCell> abm_error_table(const BridgeSampler& sampler, const ValidateAbmSettings& settings,
                                     std::uint64_t seed, bool keep_samples = false);

struct HeatmapCell {
  double sigma = 0, dt = 0, error = 0;
  bool boundary = false;
};

std::vector<HeatmapCell> abm_error_heatmap(const BridgeSampler& sampler, const HeatmapSettings& settings,
                                           std::uint64_t seed);

struct HestonBench {
  HestonParams params;
  double error = 0;
  double sevenleague_ms = 0;
  double euler_ms = 0;
  double speedup = 0;
  std::size_t rejected = 0;
  HestonDraws draws;
  std::vector<double> euler;
};

/// Both samplers single-threaded on the same machine; the 7L time covers the whole
/// on-line stage (network evaluation, grids, terminal variance, log-price).
HestonBench bench_heston(const BridgeSampler& sampler, const HestonParams& params, std::size_t n, double delta,
                         std::uint64_t seed);

struct SabrLevelResult {
  double level = 0, sigma_end = 0, error = 0;
  std::vector<double> samples, oracle;
};

std::vector<SabrLevelResult> sabr_check(const BridgeSampler& sampler, const SabrSettings& settings, std::uint64_t seed,
                                        unsigned threads = 1);

/// Empirical CDF of `samples` at `points` x-values spanning their range; columns x, F.
Eigen::MatrixXd empirical_cdf_curve(std::vector<double> samples, int points = 512);

}  // namespace sl
