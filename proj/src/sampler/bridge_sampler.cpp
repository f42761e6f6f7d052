#include "sevenleague/sampler/bridge_sampler.hpp"

#include <cmath>
#include <sstream>

#include "sevenleague/core/normal.hpp"
#include "sevenleague/core/random.hpp"
#include "sevenleague/core/statistics.hpp"

namespace sl {

void bind_training_setup(Network& net, const ParamSpace& space, const GridConfig& grid) {
  validate(space);
  validate(grid);
  if (net.input_dim() != space.dim() || net.output_dim() != grid.c_size()) {
    throw std::invalid_argument("bind_training_setup: network shape does not match the space and grid");
  }
  net.family = to_string(space.family);
  net.metadata["space"] = to_json(space);
  net.metadata["grid"] = to_json(grid);
  for (int j = 0; j < space.dim(); ++j) {
    net.input_lo[j] = space.axes[static_cast<std::size_t>(j)].lo;
    net.input_hi[j] = space.axes[static_cast<std::size_t>(j)].hi;
  }
}

Network make_regressor(const ParamSpace& space, const GridConfig& grid, std::uint64_t seed,
                       const std::vector<int>& hidden) {
  std::vector<int> sizes{space.dim()};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(grid.c_size());
  Network net = make_network(sizes, seed);
  bind_training_setup(net, space, grid);
  return net;
}

BridgeSampler make_sampler(Network net) {
  BridgeSampler s;
  try {
    s.space = param_space_from_json(net.metadata.at("space"));
    s.grid = grid_config_from_json(net.metadata.at("grid"), default_grid_config(s.space.family));
  } catch (const std::exception& e) {
    throw FamilyMismatchError(std::string("make_sampler: network carries no usable training setup: ") + e.what());
  }
  if (net.family != to_string(s.space.family)) {
    throw FamilyMismatchError("make_sampler: network family '" + net.family + "' disagrees with its parameter space");
  }
  if (net.input_dim() != s.space.dim() || net.output_dim() != s.grid.c_size()) {
    throw FamilyMismatchError("make_sampler: network shape disagrees with its parameter space and grid");
  }
  s.basis = optimal_collocation_points(s.grid.m);
  s.vandermonde_inv = vandermonde_inverse(s.basis);
  switch (s.space.family) {
    case Family::abm:
    case Family::cir:
      s.rule_a = s.rule_b = InterpRule::linear;
      break;
    case Family::gbm:
      s.rule_a = InterpRule::linear;
      s.rule_b = InterpRule::quadratic;
      s.scaling_exponent = s.space.transform == Transform::square ? 2.0 : 1.0;
      break;
  }
  if (const auto it = net.metadata.find("rules"); it != net.metadata.end()) {
    s.rule_a = interp_rule_from_string(it->value("a", to_string(s.rule_a)));
    s.rule_b = interp_rule_from_string(it->value("b", to_string(s.rule_b)));
  }
  s.net = std::move(net);
  return s;
}

void require_family(const BridgeSampler& sampler, Family family, Transform transform) {
  if (sampler.family() != family || sampler.transform() != transform) {
    throw FamilyMismatchError("sampler trained for " + to_string(sampler.family()) + "/" +
                              to_string(sampler.transform()) + ", request needs " + to_string(family) + "/" +
                              to_string(transform));
  }
}

CollocationGrids grids_for(const BridgeSampler& sampler, const Eigen::Ref<const Eigen::VectorXd>& theta,
                           GridsReport* report) {
  const ParamSpace& space = sampler.space;
  if (theta.size() != space.dim()) throw std::invalid_argument("grids_for: theta has wrong dimension");
  GridsReport rep;
  for (int j = 0; j < space.dim(); ++j) {
    const auto& axis = space.axes[static_cast<std::size_t>(j)];
    const double slack = 0.1 * (axis.hi - axis.lo);
    if (!(theta[j] >= axis.lo - slack && theta[j] <= axis.hi + slack)) {
      std::ostringstream msg;
      msg << "grids_for: " << axis.name << " = " << theta[j] << " is beyond the trained range [" << axis.lo << ", "
          << axis.hi << "] by more than 10%";
      throw ParameterRangeError(msg.str());
    }
    if (theta[j] < axis.lo || theta[j] > axis.hi) rep.outside_training = true;
  }
  const ModelSpec model = model_from_theta(space, theta);
  validate(model);
  const GridConfig cfg = sampler.grid.resolved_for(model);

  CollocationGrids grids;
  grids.m_a = cfg.m_a;
  grids.m_b = cfg.m_b;
  grids.m = cfg.m;
  grids.basis = sampler.basis;
  grids.a = build_grid_a(cfg);
  grids.b = build_grid_b(model, grids.a, cfg);
  const Eigen::VectorXd c = forward(sampler.net, scale_theta(space, theta));
  grids.c.assign(c.begin(), c.end());
  for (std::size_t cell = 0; cell < grids.c.size(); cell += static_cast<std::size_t>(cfg.m)) {
    if (isotonic_nondecreasing(std::span<double>(grids.c.data() + cell, static_cast<std::size_t>(cfg.m))) > 0) {
      ++rep.repaired_cells;
    }
  }
  if (report) *report = rep;
  return grids;
}

namespace {

void check_pair(Family family, const BoundaryPair& p, std::size_t index) {
  const bool finite = std::isfinite(p.a) && std::isfinite(p.b);
  bool ok = finite;
  if (family == Family::gbm) ok = ok && p.a > 0 && p.b > 0;
  if (family == Family::cir) ok = ok && p.a >= 0 && p.b >= 0;
  if (!ok) {
    std::ostringstream msg;
    msg << "pair " << index << " (a=" << p.a << ", b=" << p.b << ") is not admissible for " << to_string(family);
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

Eigen::MatrixXd pair_coefficients(const BridgeSampler& sampler, const CollocationGrids& grids,
                                  std::span<const BoundaryPair> pairs, SampleReport* report) {
  const int m = grids.m;
  const bool scaled = sampler.scaling_exponent > 0;
  Eigen::MatrixXd z(m, static_cast<Eigen::Index>(pairs.size()));
  RowsAtA rows;
  double rows_a = std::nan("");
  std::size_t extrap_a = 0, extrap_b = 0;

  for (std::size_t n = 0; n < pairs.size(); ++n) {
    const BoundaryPair& p = pairs[n];
    check_pair(sampler.family(), p, n);
    const double a = scaled ? grids.a[0] : p.a;
    const double b = scaled ? p.b / p.a * grids.a[0] : p.b;
    if (!(a == rows_a)) {
      rows = interpolate_along_a(grids, a, sampler.rule_a);
      rows_a = a;
    }
    auto col = z.col(static_cast<Eigen::Index>(n));
    extrap_a += rows.extrapolated;
    extrap_b += interpolate_along_b(rows, b, sampler.rule_b, col);
    if (scaled) col *= std::pow(p.a / grids.a[0], sampler.scaling_exponent);
  }
  Eigen::MatrixXd alpha = sampler.vandermonde_inv * z;

  if (report) {
    report->extrapolated_a += extrap_a;
    report->extrapolated_b += extrap_b;
    const double lo = sampler.basis.xi[0] - 1.0;
    const double hi = sampler.basis.xi[m - 1] + 1.0;
    for (Eigen::Index n = 0; n < alpha.cols(); ++n) {
      if (!is_monotone_on(alpha.col(n), lo, hi)) ++report->non_monotone;
    }
  }
  return alpha;
}

void evaluate_columns(const Eigen::Ref<const Eigen::MatrixXd>& alpha, const Eigen::Ref<const Eigen::VectorXd>& xi,
                      std::span<double> out) {
  const Eigen::Index m = alpha.rows();
  for (Eigen::Index n = 0; n < alpha.cols(); ++n) {
    const double* a = alpha.col(n).data();
    const double x = xi[n];
    double acc = a[m - 1];
    for (Eigen::Index i = m - 2; i >= 0; --i) acc = acc * x + a[i];
    out[static_cast<std::size_t>(n)] = acc;
  }
}

std::vector<double> sample(const BridgeSampler& sampler, const Eigen::Ref<const Eigen::VectorXd>& theta,
                           std::span<const BoundaryPair> pairs, std::uint64_t seed, SampleReport* report) {
  if (pairs.empty()) throw std::invalid_argument("sample: no pairs");
  SampleReport rep;
  const CollocationGrids grids = grids_for(sampler, theta, &rep.grids);
  const Eigen::MatrixXd alpha = pair_coefficients(sampler, grids, pairs, &rep);
  Eigen::VectorXd xi(static_cast<Eigen::Index>(pairs.size()));
  Rng rng(seed);
  rng.fill_normal(xi);
  std::vector<double> out(pairs.size());
  evaluate_columns(alpha, xi, out);
  if (report) *report = rep;
  return out;
}

std::vector<double> sample_pair(const BridgeSampler& sampler, const Eigen::Ref<const Eigen::VectorXd>& theta,
                                BoundaryPair pair, std::size_t n, std::uint64_t seed, SampleReport* report) {
  if (n == 0) throw std::invalid_argument("sample_pair: n must be positive");
  SampleReport rep;
  const CollocationGrids grids = grids_for(sampler, theta, &rep.grids);
  SampleReport one;
  const Eigen::VectorXd alpha = pair_coefficients(sampler, grids, std::span<const BoundaryPair>(&pair, 1), &one);
  rep.extrapolated_a = one.extrapolated_a * n;
  rep.extrapolated_b = one.extrapolated_b * n;
  rep.non_monotone = one.non_monotone * n;
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = polyval(alpha, rng.normal());
  if (report) *report = rep;
  return out;
}

QuantileCurve sample_quantile_function(const BridgeSampler& sampler, const Eigen::Ref<const Eigen::VectorXd>& theta,
                                       BoundaryPair pair, std::span<const double> levels) {
  if (levels.empty()) throw std::invalid_argument("sample_quantile_function: no levels");
  const CollocationGrids grids = grids_for(sampler, theta);
  const Eigen::VectorXd alpha = pair_coefficients(sampler, grids, std::span<const BoundaryPair>(&pair, 1));
  QuantileCurve curve;
  curve.values.reserve(levels.size());
  double lo = INFINITY, hi = -INFINITY;
  for (double p : levels) {
    const double x = std_normal_inv_cdf(p);
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    curve.values.push_back(polyval(alpha, x));
  }
  curve.monotone = levels.size() < 2 || is_monotone_on(alpha, lo, hi);
  return curve;
}

}  // namespace sl
