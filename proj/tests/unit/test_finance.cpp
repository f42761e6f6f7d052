#include <doctest.h>

#include <cmath>
#include <vector>

#include "support/fixtures.hpp"
#include "sevenleague/core/normal.hpp"
#include "sevenleague/core/statistics.hpp"
#include "sevenleague/finance/heston.hpp"
#include "sevenleague/finance/sabr.hpp"

using namespace sl;
using sl::testing::constant_sampler;

namespace {

double third_central_moment(const std::vector<double>& x) {
  const auto m = sample_moments(x);
  double s = 0;
  for (double v : x) s += std::pow(v - m.mean, 3);
  return s / static_cast<double>(x.size());
}

BridgeSampler cir_sampler_for(const HestonParams& p) {
  GridConfig grid = default_grid_config(Family::cir);
  grid.n_paths = 100'000;
  grid.n_neighbors = 1000;
  const auto grids = compress(heston_variance_model(p), grid, 21);
  return constant_sampler(desk_param_space(Family::cir), grid, grids.c);
}

}  // namespace

TEST_SUITE("finance") {

TEST_CASE("Heston parameter sets") {
  CHECK(heston_set_ids().size() == 6);
  const auto one = heston_parameter_set("I");
  CHECK(one.dt_total == 0.5);
  CHECK(one.kappa == 1.0);
  CHECK(one.vbar == 0.4);
  CHECK(one.gamma == 0.2);
  CHECK(one.v0 == one.vbar);
  CHECK(one.rho == -0.5);
  CHECK(one.r == 0.01);
  const auto six = heston_parameter_set("6");
  CHECK(six.v0 == doctest::Approx(3 * 0.05));
  CHECK(six.gamma == 0.4);
  CHECK(heston_parameter_set("IV").v0 == doctest::Approx(0.2));
  CHECK_THROWS_AS(heston_parameter_set("VII"), std::invalid_argument);
  HestonParams bad = one;
  bad.rho = 1.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("log-price identity") {
  HestonParams p = heston_parameter_set("I");
  p.rho = 0;
  CHECK(heston_log_price(p, 0.2, 0.35, 0.7) ==
        doctest::Approx(p.r * p.dt_total - 0.1 + std::sqrt(0.2) * 0.7).epsilon(1e-14));
  p.rho = -0.5;
  const double c = p.rho / p.gamma;
  const double expected = (p.r - c * p.kappa * p.vbar) * p.dt_total + (c * p.kappa - 0.5) * 0.2 +
                          c * (0.35 - p.v0) + std::sqrt(0.75) * std::sqrt(0.2) * 0.7;
  CHECK(heston_log_price(p, 0.2, 0.35, 0.7) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("Euler benchmark basics") {
  const auto p = heston_parameter_set("I");
  CHECK(heston_euler_benchmark(p, 0.01, 0, 1).empty());
  CHECK(heston_euler_benchmark(p, 0.01, 500, 2) == heston_euler_benchmark(p, 0.01, 500, 2, 3));

  // Almost constant variance: X is Gaussian.
  HestonParams flat = p;
  flat.gamma = 1e-8;
  const auto x = heston_euler_benchmark(flat, 0.01, 100'000, 3);
  const double mean = (flat.r - flat.vbar / 2) * flat.dt_total;
  const double sd = std::sqrt(flat.vbar * flat.dt_total);
  CHECK(cdf_sup_distance(x, [&](double v) { return std_normal_cdf((v - mean) / sd); }) < 0.01);

  // Negative correlation skews the log-price to the left.
  HestonParams wild = p;
  wild.gamma = 0.6;
  wild.rho = 0.0;
  const double m3_zero = third_central_moment(heston_euler_benchmark(wild, 0.01, 50'000, 4));
  wild.rho = -0.7;
  const double m3_neg = third_central_moment(heston_euler_benchmark(wild, 0.01, 50'000, 4));
  CHECK(m3_neg < m3_zero);
  CHECK(m3_neg < 0);
}

TEST_CASE("7L Heston draws reproduce the Euler reference") {
  const auto p = heston_parameter_set("I");
  const auto sampler = cir_sampler_for(p);
  const auto draws = heston_sample(p, sampler, 100'000, 5);
  REQUIRE(draws.x.size() == 100'000);
  for (std::size_t i = 0; i < draws.x.size(); i += 997) {
    CHECK(draws.x[i] == doctest::Approx(heston_log_price(p, draws.iv[i], draws.v_end[i], draws.g[i])).epsilon(1e-12));
    CHECK(draws.iv[i] > 0);
    CHECK(draws.v_end[i] >= 0);
  }
  CHECK(draws.rejected <= draws.x.size() / 100);
  const auto euler = heston_euler_benchmark(p, 0.01, 100'000, 6);
  CHECK(cdf_sup_distance(draws.x, euler) <= 8e-3);
  CHECK(heston_sample(p, sampler, 1000, 5).x == heston_sample(p, sampler, 1000, 5).x);
}

TEST_CASE("terminal variance draws follow the exact CIR law") {
  const auto p = heston_parameter_set("I");
  const auto sampler = cir_sampler_for(p);
  const auto draws = heston_sample(p, sampler, 50'000, 7);
  const double c = p.gamma * p.gamma * (1 - std::exp(-p.kappa * p.dt_total)) / (4 * p.kappa);
  const double d = 4 * p.kappa * p.vbar / (p.gamma * p.gamma);
  const double lambda = p.v0 * std::exp(-p.kappa * p.dt_total) / c;
  const auto m = sample_moments(draws.v_end);
  CHECK(std::abs(m.mean - c * (d + lambda)) <= 3 * std::sqrt(c * c * (2 * d + 4 * lambda) / 50'000));
}

TEST_CASE("Heston sampling needs a CIR sampler") {
  const GridConfig grid = default_grid_config(Family::abm);
  const auto abm = constant_sampler(desk_param_space(Family::abm), grid,
                                    sl::testing::abm_exact_c(grid, 0.04, 0.3, 1.0));
  CHECK_THROWS_AS(heston_sample(heston_parameter_set("I"), abm, 10, 1), FamilyMismatchError);
}

TEST_CASE("SABR integrated variance") {
  const ModelSpec vol = sabr_volatility_model(0.3, 1.0);
  CHECK(vol.family() == Family::gbm);
  CHECK(vol.transform == Transform::square);
  CHECK(std::get<Gbm>(vol.dynamics).mu == 0.0);
  CHECK(sabr_terminal_quantile(0.3, 1.0, 2.0, 0.5) == doctest::Approx(2 * std::exp(-0.045)).epsilon(1e-12));
  CHECK_THROWS_AS(validate(SabrIvRequest{0.3, 1.0, -1.0, 1.0}), std::invalid_argument);

  GridConfig grid = default_grid_config(Family::gbm);
  grid.n_paths = 100'000;
  grid.n_neighbors = 1000;
  grid.n_steps = 50;
  const auto grids = compress(vol, grid, 8);
  const auto sampler = constant_sampler(sabr_param_space(), grid, grids.c);

  const auto base = sabr_iv_sample({0.3, 1.0, 1.0, 1.2}, sampler, 1000, 9);
  const auto doubled = sabr_iv_sample({0.3, 1.0, 2.0, 2.4}, sampler, 1000, 9);
  for (std::size_t i = 0; i < base.size(); ++i) CHECK(doubled[i] == doctest::Approx(4 * base[i]).epsilon(1e-13));

  const double sigma_end = sabr_terminal_quantile(0.3, 1.0, 1.0, 0.35);
  const std::vector<double> ends{sigma_end};
  const auto oracle = sabr_iv_bundle_oracle(0.3, 1.0, 1.0, ends, 400'000, 2000, 50, 10);
  REQUIRE(oracle.size() == 1);
  CHECK(oracle[0].size() == 4000);
  const auto draws = sabr_iv_sample({0.3, 1.0, 1.0, sigma_end}, sampler, 100'000, 11);
  CHECK(cdf_sup_distance(draws, oracle[0]) <= 0.03);

  const GridConfig abm_grid = default_grid_config(Family::abm);
  const auto abm = constant_sampler(desk_param_space(Family::abm), abm_grid,
                                    sl::testing::abm_exact_c(abm_grid, 0.04, 0.3, 1.0));
  CHECK_THROWS_AS(sabr_iv_sample({0.3, 1.0, 1.0, 1.0}, abm, 10, 1), FamilyMismatchError);
}

}
