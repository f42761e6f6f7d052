#include "sevenleague/app/experiments.hpp"

#include <algorithm>
#include <chrono>

#include "sevenleague/core/normal.hpp"
#include "sevenleague/core/random.hpp"
#include "sevenleague/core/statistics.hpp"
#include "sevenleague/finance/sabr.hpp"

namespace sl {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double analytic_abm_error(std::span<const double> samples, double a, double b, double sigma, double dt) {
  const GaussianLaw law = abm_bridge_integral_law(a, b, sigma, dt);
  return cdf_sup_distance(samples, [&](double x) { return std_normal_cdf((x - law.mean) / law.std); });
}

}  // namespace

std::vector<AbmCell> abm_error_table(const BridgeSampler& sampler, const ValidateAbmSettings& settings,
                                     std::uint64_t seed, bool keep_samples) {
  require_family(sampler, Family::abm, Transform::identity);
  const Eigen::VectorXd theta = theta_from_values(sampler.space, settings.theta);
  const ModelSpec model = model_from_theta(sampler.space, theta);
  const auto& abm = std::get<Abm>(model.dynamics);
  std::vector<AbmCell> cells;
  std::uint64_t stream = 0;
  for (double a : settings.a) {
    for (double level : settings.b_levels) {
      AbmCell cell;
      cell.a = a;
      cell.b = terminal_quantile(model, a, level);
      cell.level = level;
      SampleReport report;
      const auto start = Clock::now();
      auto z = sample_pair(sampler, theta, {cell.a, cell.b}, settings.n, derive_seed(seed, stream++), &report);
      cell.wall_ms = elapsed_ms(start);
      cell.extrapolated = report.extrapolated_a + report.extrapolated_b > 0;
      cell.error = analytic_abm_error(z, cell.a, cell.b, abm.sigma, model.dt_total);
      if (keep_samples) cell.samples = std::move(z);
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

std::vector<HeatmapCell> abm_error_heatmap(const BridgeSampler& sampler, const HeatmapSettings& settings,
                                           std::uint64_t seed) {
  require_family(sampler, Family::abm, Transform::identity);
  std::vector<HeatmapCell> cells;
  std::uint64_t stream = 0;
  for (double sigma : settings.sigma) {
    for (double dt : settings.dt) {
      const Eigen::VectorXd theta =
          theta_from_values(sampler.space, {{"mu", settings.mu}, {"sigma", sigma}, {"dt", dt}});
      const ModelSpec model = model_from_theta(sampler.space, theta);
      const double b = terminal_quantile(model, settings.a, settings.level);
      const auto z = sample_pair(sampler, theta, {settings.a, b}, settings.n, derive_seed(seed, stream++));
      cells.push_back({sigma, dt, analytic_abm_error(z, settings.a, b, sigma, dt),
                       sigma < settings.small_sigma || dt < settings.small_dt});
    }
  }
  return cells;
}

HestonBench bench_heston(const BridgeSampler& sampler, const HestonParams& params, std::size_t n, double delta,
                         std::uint64_t seed) {
  HestonBench bench;
  bench.params = params;
  auto start = Clock::now();
  bench.draws = heston_sample(params, sampler, n, derive_seed(seed, 0));
  bench.sevenleague_ms = elapsed_ms(start);
  start = Clock::now();
  bench.euler = heston_euler_benchmark(params, delta, n, derive_seed(seed, 1));
  bench.euler_ms = elapsed_ms(start);
  bench.speedup = bench.euler_ms / bench.sevenleague_ms;
  bench.rejected = bench.draws.rejected;
  bench.error = cdf_sup_distance(bench.draws.x, bench.euler);
  return bench;
}

std::vector<SabrLevelResult> sabr_check(const BridgeSampler& sampler, const SabrSettings& settings, std::uint64_t seed,
                                        unsigned threads) {
  std::vector<SabrLevelResult> out;
  std::vector<double> targets;
  for (double level : settings.levels) {
    SabrLevelResult r;
    r.level = level;
    r.sigma_end = sabr_terminal_quantile(settings.alpha, settings.dt, settings.sigma0, level);
    targets.push_back(r.sigma_end);
    out.push_back(std::move(r));
  }
  auto oracle = sabr_iv_bundle_oracle(settings.alpha, settings.dt, settings.sigma0, targets, settings.oracle_paths,
                                      settings.oracle_neighbors, settings.oracle_steps, derive_seed(seed, 0), threads);
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j].samples = sabr_iv_sample({settings.alpha, settings.dt, settings.sigma0, out[j].sigma_end}, sampler,
                                    settings.n, derive_seed(seed, j + 1));
    out[j].oracle = std::move(oracle[j]);
    out[j].error = cdf_sup_distance(out[j].samples, out[j].oracle);
  }
  return out;
}

Eigen::MatrixXd empirical_cdf_curve(std::vector<double> samples, int points) {
  if (samples.empty() || points < 2) throw std::invalid_argument("empirical_cdf_curve: need samples and 2+ points");
  std::sort(samples.begin(), samples.end());
  Eigen::MatrixXd curve(points, 2);
  const double lo = samples.front(), hi = samples.back();
  for (int i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * i / (points - 1);
    const auto below = std::upper_bound(samples.begin(), samples.end(), x) - samples.begin();
    curve(i, 0) = x;
    curve(i, 1) = static_cast<double>(below) / static_cast<double>(samples.size());
  }
  return curve;
}

}  // namespace sl
