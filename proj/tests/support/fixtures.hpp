#pragma once

#include <vector>

#include "sevenleague/compression/compression.hpp"
#include "sevenleague/dataset/param_space.hpp"
#include "sevenleague/sampler/bridge_sampler.hpp"

namespace sl::testing {

/// A sampler whose network returns `c` for every theta: all weights zero, C in the output offset.
inline BridgeSampler constant_sampler(const ParamSpace& space, const GridConfig& grid, const std::vector<double>& c) {
  Network net = make_regressor(space, grid, 1, {4});
  for (auto& w : net.weights) w.setZero();
  for (auto& b : net.biases) b.setZero();
  net.output_mean = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
  net.output_scale.setOnes();
  return make_sampler(std::move(net));
}

/// Exact ABM grid C at theta from the Gaussian bridge-integral law.
inline std::vector<double> abm_exact_c(const GridConfig& grid, double mu, double sigma, double dt) {
  const ModelSpec model{Abm{mu, sigma}, Transform::identity, dt};
  const auto basis = optimal_collocation_points(grid.m);
  const Eigen::VectorXd a = build_grid_a(grid);
  const Eigen::MatrixXd b = build_grid_b(model, a, grid);
  std::vector<double> c;
  for (int i = 0; i < grid.m_a; ++i) {
    for (int h = 0; h < grid.m_b; ++h) {
      const auto law = abm_bridge_integral_law(a[i], b(i, h), sigma, dt);
      for (int k = 0; k < grid.m; ++k) c.push_back(law.mean + law.std * basis.xi[k]);
    }
  }
  return c;
}

inline ParamSpace abm_space() { return desk_param_space(Family::abm); }

}  // namespace sl::testing
