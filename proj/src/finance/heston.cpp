#include "sevenleague/finance/heston.hpp"

#include <cmath>
#include <sstream>

#include "sevenleague/core/parallel.hpp"
#include "sevenleague/core/random.hpp"

namespace sl {

void validate(const HestonParams& p) {
  const bool ok = p.kappa > 0 && p.vbar > 0 && p.gamma > 0 && std::abs(p.rho) < 1 && p.v0 >= 0 && p.dt_total > 0 &&
                  std::isfinite(p.r) && std::isfinite(p.x0);
  if (!ok) throw std::invalid_argument("heston: need kappa, vbar, gamma, dt > 0, v0 >= 0 and |rho| < 1");
}

std::vector<std::string> heston_set_ids() { return {"I", "II", "III", "IV", "V", "VI"}; }

HestonParams heston_parameter_set(const std::string& id) {
  const auto ids = heston_set_ids();
  int index = -1;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (id == ids[i] || id == std::to_string(i + 1)) index = static_cast<int>(i);
  }
  HestonParams p;
  switch (index) {
    case 0: p.dt_total = 0.5, p.kappa = 1.0, p.vbar = 0.4, p.gamma = 0.2, p.v0 = p.vbar; break;
    case 1: p.dt_total = 0.5, p.kappa = 0.6, p.vbar = 0.05, p.gamma = 0.4, p.v0 = p.vbar; break;
    case 2: p.dt_total = 1.0, p.kappa = 1.0, p.vbar = 0.4, p.gamma = 0.2, p.v0 = p.vbar; break;
    case 3: p.dt_total = 1.0, p.kappa = 1.0, p.vbar = 0.4, p.gamma = 0.2, p.v0 = 0.5 * p.vbar; break;
    case 4: p.dt_total = 1.0, p.kappa = 0.6, p.vbar = 0.05, p.gamma = 0.4, p.v0 = p.vbar; break;
    case 5: p.dt_total = 1.0, p.kappa = 0.6, p.vbar = 0.05, p.gamma = 0.4, p.v0 = 3.0 * p.vbar; break;
    default: throw std::invalid_argument("unknown Heston parameter set '" + id + "'");
  }
  p.r = 0.01;
  p.rho = -0.5;
  p.x0 = 0.0;
  return p;
}

ModelSpec heston_variance_model(const HestonParams& p) {
  return ModelSpec{Cir{p.kappa, p.vbar, p.gamma}, Transform::identity, p.dt_total};
}

double heston_log_price(const HestonParams& p, double iv, double v_end, double g) {
  const double c = p.rho / p.gamma;
  return p.x0 + (p.r - c * p.kappa * p.vbar) * p.dt_total + (c * p.kappa - 0.5) * iv + c * (v_end - p.v0) +
         std::sqrt(1.0 - p.rho * p.rho) * std::sqrt(iv) * g;
}

HestonDraws heston_sample(const HestonParams& p, const BridgeSampler& sampler, std::size_t n, std::uint64_t seed) {
  validate(p);
  require_family(sampler, Family::cir, Transform::identity);
  HestonDraws d;
  if (n == 0) return d;
  const Eigen::VectorXd theta =
      theta_from_values(sampler.space, {{"kappa", p.kappa}, {"ybar", p.vbar}, {"gamma", p.gamma}, {"dt", p.dt_total}});
  const CollocationGrids grids = grids_for(sampler, theta, &d.report.grids);

  d.v_end = cir_terminal_sample(heston_variance_model(p), p.v0, n, derive_seed(seed, 0));
  std::vector<BoundaryPair> pairs(n);
  for (std::size_t j = 0; j < n; ++j) pairs[j] = {p.v0, d.v_end[j]};
  const Eigen::MatrixXd alpha = pair_coefficients(sampler, grids, pairs, &d.report);

  Eigen::VectorXd xi(static_cast<Eigen::Index>(n));
  Rng xi_rng(derive_seed(seed, 1));
  xi_rng.fill_normal(xi);
  d.iv.resize(n);
  evaluate_columns(alpha, xi, d.iv);

  Rng redraw(derive_seed(seed, 3));
  for (std::size_t j = 0; j < n; ++j) {
    int attempts = 0;
    while (!(d.iv[j] > 0)) {
      if (++attempts > 1000) throw RejectionRateError("heston_sample: integrated variance stays non-positive");
      ++d.rejected;
      d.iv[j] = polyval(alpha.col(static_cast<Eigen::Index>(j)), redraw.normal());
    }
  }
  if (d.rejected * 100 > n) {
    std::ostringstream msg;
    msg << "heston_sample: " << d.rejected << " of " << n
        << " integrated-variance draws were non-positive (limit 1%); the sampler is unreliable for these parameters";
    throw RejectionRateError(msg.str());
  }

  d.g.resize(n);
  Rng g_rng(derive_seed(seed, 2));
  for (auto& v : d.g) v = g_rng.normal();
  d.x.resize(n);
  for (std::size_t j = 0; j < n; ++j) d.x[j] = heston_log_price(p, d.iv[j], d.v_end[j], d.g[j]);
  return d;
}

std::vector<double> heston_euler_benchmark(const HestonParams& p, double delta, std::size_t n, std::uint64_t seed,
                                           unsigned threads) {
  validate(p);
  if (!(delta > 0)) throw std::invalid_argument("heston_euler_benchmark: delta must be positive");
  std::vector<double> out(n);
  if (n == 0) return out;
  const int steps = std::max(1, static_cast<int>(std::lround(p.dt_total / delta)));
  const double h = p.dt_total / steps;
  const double sqrt_h = std::sqrt(h);
  const double rho_c = std::sqrt(1.0 - p.rho * p.rho);
  parallel_for(n, threads, [&](std::size_t j) {
    Rng rng(derive_seed(seed, j));
    double x = p.x0, v = p.v0;
    for (int s = 0; s < steps; ++s) {
      const double vp = v > 0 ? v : 0.0;
      const double sv = std::sqrt(vp) * sqrt_h;
      const double z1 = rng.normal();
      const double z2 = rng.normal();
      x += (p.r - 0.5 * vp) * h + sv * z1;
      v += p.kappa * (p.vbar - vp) * h + p.gamma * sv * (p.rho * z1 + rho_c * z2);
    }
    out[j] = x;
  });
  return out;
}

}  // namespace sl
