#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "sevenleague/compression/compression.hpp"
#include "sevenleague/dataset/param_space.hpp"
#include "sevenleague/nn/network.hpp"
#include "sevenleague/sampler/interpolation.hpp"

namespace sl {

/// Initial and final value of the conditioning process.
struct BoundaryPair {
  double a = 0;
  double b = 0;
};

/// The trained map theta -> C together with everything needed to turn C into samples.
/// Immutable once built; all sampling calls are const.
struct BridgeSampler {
  Network net;
  ParamSpace space;
  GridConfig grid;
  CollocationBasis basis;
  Eigen::MatrixXd vandermonde_inv;
  InterpRule rule_a = InterpRule::linear;
  InterpRule rule_b = InterpRule::linear;
  /// 0 disables GBM scaling; otherwise Z(a, b) = a^exponent Z(1, b / a).
  double scaling_exponent = 0;

  Family family() const { return space.family; }
  Transform transform() const { return space.transform; }
};

class FamilyMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParameterRangeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Records the parameter space and grid in the network metadata, sets the input
/// scaler to the declared ranges and names the family.
void bind_training_setup(Network& net, const ParamSpace& space, const GridConfig& grid);

/// Network with d inputs, the given hidden widths and M_a M_b M outputs, already bound.
Network make_regressor(const ParamSpace& space, const GridConfig& grid, std::uint64_t seed,
                       const std::vector<int>& hidden = {50, 50, 50, 50});

/// Builds a sampler from a bound network with the family's default rules:
/// ABM and CIR linear in both directions, GBM quadratic along b with scaling.
/// Throws FamilyMismatchError when the metadata is missing or inconsistent.
BridgeSampler make_sampler(Network net);

/// Throws FamilyMismatchError unless the sampler was trained for this family and transform.
void require_family(const BridgeSampler& sampler, Family family, Transform transform);

struct GridsReport {
  int repaired_cells = 0;       // cells whose predicted points needed isotonic repair
  bool outside_training = false;
};

/// Grid A from the configuration, B analytic, C predicted and repaired along k.
/// Throws ParameterRangeError when theta overshoots a trained range by more than 10%.
CollocationGrids grids_for(const BridgeSampler& sampler, const Eigen::Ref<const Eigen::VectorXd>& theta,
                           GridsReport* report = nullptr);

struct SampleReport {
  GridsReport grids;
  std::size_t extrapolated_a = 0;
  std::size_t extrapolated_b = 0;
  std::size_t non_monotone = 0;  // pairs whose g_M decreases somewhere on [xi_1 - 1, xi_M + 1]
};

/// Lagrange coefficients for a batch of pairs, one column per pair (M x n).
/// GBM scaling and the admissibility checks are applied here.
Eigen::MatrixXd pair_coefficients(const BridgeSampler& sampler, const CollocationGrids& grids,
                                  std::span<const BoundaryPair> pairs, SampleReport* report = nullptr);

/// One sample of Z(theta | a, b) per pair: g_M evaluated at independent standard normals.
std::vector<double> sample(const BridgeSampler& sampler, const Eigen::Ref<const Eigen::VectorXd>& theta,
                           std::span<const BoundaryPair> pairs, std::uint64_t seed, SampleReport* report = nullptr);

/// n samples at a single pair.
std::vector<double> sample_pair(const BridgeSampler& sampler, const Eigen::Ref<const Eigen::VectorXd>& theta,
                                BoundaryPair pair, std::size_t n, std::uint64_t seed, SampleReport* report = nullptr);

struct QuantileCurve {
  std::vector<double> values;
  bool monotone = true;
};

/// g_M(Phi^-1(p)) for each level p in (0, 1).
QuantileCurve sample_quantile_function(const BridgeSampler& sampler, const Eigen::Ref<const Eigen::VectorXd>& theta,
                                       BoundaryPair pair, std::span<const double> levels);

/// Evaluates the polynomial in column j of `alpha` at xi[j].
void evaluate_columns(const Eigen::Ref<const Eigen::MatrixXd>& alpha, const Eigen::Ref<const Eigen::VectorXd>& xi,
                      std::span<double> out);

}  // namespace sl
