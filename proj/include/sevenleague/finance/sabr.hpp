#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sevenleague/sampler/bridge_sampler.hpp"

namespace sl {

/// Integrated squared volatility of d sigma = alpha sigma dW on [0, dt_total]
/// conditioned on sigma(0) = sigma0 and sigma(dt_total) = sigma_end.
struct SabrIvRequest {
  double alpha = 0.3;
  double dt_total = 1;
  double sigma0 = 1;
  double sigma_end = 1;
};

void validate(const SabrIvRequest& req);

/// The driftless GBM volatility with the square integrand.
ModelSpec sabr_volatility_model(double alpha, double dt_total);

/// Quantile of sigma(dt_total) given sigma(0) = sigma0.
double sabr_terminal_quantile(double alpha, double dt_total, double sigma0, double p);

/// n samples of sigma0^2 Z(alpha, dt | 1, sigma_end / sigma0) from a GBM square-transform sampler.
std::vector<double> sabr_iv_sample(const SabrIvRequest& req, const BridgeSampler& sampler, std::size_t n,
                                   std::uint64_t seed, SampleReport* report = nullptr);

/// Brute-force reference: for each sigma_end, integrals of the 2N simulated paths
/// from sigma0 whose terminal volatility is nearest it.
std::vector<std::vector<double>> sabr_iv_bundle_oracle(double alpha, double dt_total, double sigma0,
                                                       std::span<const double> sigma_ends, std::size_t n_paths,
                                                       std::size_t n_neighbors, int n_steps, std::uint64_t seed,
                                                       unsigned threads = 1);

}  // namespace sl
