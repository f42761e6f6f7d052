#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sevenleague/sampler/bridge_sampler.hpp"

namespace sl {

/// dX = (r - v/2) dt + sqrt(v) dW_x, dv = kappa (vbar - v) dt + gamma sqrt(v) dW_v,
/// d<W_x, W_v> = rho dt, with X the log-price.
struct HestonParams {
  double kappa = 1;
  double vbar = 0.4;
  double gamma = 0.2;
  double rho = -0.5;
  double r = 0.01;
  double v0 = 0.4;
  double x0 = 0;
  double dt_total = 1;
};

void validate(const HestonParams& p);

/// Parameter sets I to VI of the reference experiments, r = 0.01, rho = -0.5, X0 = 0.
/// Accepts "I".."VI" or "1".."6"; throws std::invalid_argument otherwise.
HestonParams heston_parameter_set(const std::string& id);
std::vector<std::string> heston_set_ids();

/// The CIR parameters of the variance as a model on the horizon dt_total.
ModelSpec heston_variance_model(const HestonParams& p);

/// X(dt) given the integrated variance, the terminal variance and a standard normal.
double heston_log_price(const HestonParams& p, double iv, double v_end, double g);

struct HestonDraws {
  std::vector<double> x;
  std::vector<double> iv;
  std::vector<double> v_end;
  std::vector<double> g;
  std::size_t rejected = 0;  // integrated-variance draws <= 0 that were redrawn
  SampleReport report;
};

class RejectionRateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// n draws of X(dt): exact terminal variance, integrated variance from the CIR
/// sampler at (v0, v_end), then the log-price identity. Non-positive integrated
/// variances are redrawn; more than 1% of such draws raises RejectionRateError.
HestonDraws heston_sample(const HestonParams& p, const BridgeSampler& sampler, std::size_t n, std::uint64_t seed);

/// Full-truncation Euler with step delta and correlated increments.
std::vector<double> heston_euler_benchmark(const HestonParams& p, double delta, std::size_t n, std::uint64_t seed,
                                           unsigned threads = 1);

}  // namespace sl
