#include "sevenleague/finance/sabr.hpp"

#include <cmath>

namespace sl {

void validate(const SabrIvRequest& req) {
  if (!(req.alpha > 0 && req.dt_total > 0 && req.sigma0 > 0 && req.sigma_end > 0)) {
    throw std::invalid_argument("sabr: alpha, dt, sigma0 and sigma_end must be positive");
  }
}

ModelSpec sabr_volatility_model(double alpha, double dt_total) {
  return ModelSpec{Gbm{0.0, alpha}, Transform::square, dt_total};
}

double sabr_terminal_quantile(double alpha, double dt_total, double sigma0, double p) {
  return terminal_quantile(sabr_volatility_model(alpha, dt_total), sigma0, p);
}

std::vector<double> sabr_iv_sample(const SabrIvRequest& req, const BridgeSampler& sampler, std::size_t n,
                                   std::uint64_t seed, SampleReport* report) {
  validate(req);
  require_family(sampler, Family::gbm, Transform::square);
  if (sampler.scaling_exponent != 2.0) throw FamilyMismatchError("sabr: sampler must scale with exponent 2");
  const Eigen::VectorXd theta = theta_from_values(sampler.space, {{"sigma", req.alpha}, {"dt", req.dt_total}, {"mu", 0.0}});
  return sample_pair(sampler, theta, {req.sigma0, req.sigma_end}, n, seed, report);
}

std::vector<std::vector<double>> sabr_iv_bundle_oracle(double alpha, double dt_total, double sigma0,
                                                       std::span<const double> sigma_ends, std::size_t n_paths,
                                                       std::size_t n_neighbors, int n_steps, std::uint64_t seed,
                                                       unsigned threads) {
  for (double s : sigma_ends) validate(SabrIvRequest{alpha, dt_total, sigma0, s});
  return nearest_bundles(sabr_volatility_model(alpha, dt_total), sigma0, sigma_ends, n_paths, n_neighbors, n_steps,
                         seed, threads);
}

}  // namespace sl
