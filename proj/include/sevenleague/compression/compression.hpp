#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sevenleague/core/collocation.hpp"
#include "sevenleague/models/sde.hpp"

namespace sl {

/// How the grid-A endpoints are read: as absolute values, or as multiples of the
/// CIR long-term level.
enum class ARange { absolute, long_term_multiple };

/// Grid dimensions and the Monte Carlo knobs of the compression stage.
struct GridConfig {
  int m_a = 2;
  int m_b = 2;
  int m = 3;
  double a_min = 0.0;
  double a_max = 1.0;
  ARange a_range = ARange::absolute;
  double q_lo = 0.2;
  double q_hi = 0.8;
  std::size_t n_paths = 200'000;
  /// N: paths taken on each side of a reference final value. 0 selects n_paths / 200.
  std::size_t n_neighbors = 0;
  /// Minimum number of time steps per path.
  int n_steps = 16;
  /// Largest allowed step in years; the effective count is max(n_steps, ceil(dt / max_step)).
  double max_step = 0.005;

  std::size_t neighbors() const { return n_neighbors > 0 ? n_neighbors : n_paths / 200; }
  int steps_for(double dt) const;
  /// The same configuration with grid-A endpoints expressed as absolute values for `model`.
  GridConfig resolved_for(const ModelSpec& model) const;
  /// Total number of collocation values, M_a * M_b * M.
  int c_size() const { return m_a * m_b * m; }
};

/// Throws std::invalid_argument when the configuration violates its invariants.
void validate(const GridConfig& cfg);

/// Per-family defaults for the grid dimensions, quantile bounds and grid-A range.
GridConfig default_grid_config(Family family);

nlohmann::json to_json(const GridConfig& cfg);
/// Missing keys keep the values of `base`.
GridConfig grid_config_from_json(const nlohmann::json& doc, const GridConfig& base);

/// C is stored flat in row-major (i, h, k) order.
struct CollocationGrids {
  Eigen::VectorXd a;
  Eigen::MatrixXd b;               // M_a x M_b
  std::vector<double> c;           // M_a * M_b * M
  CollocationBasis basis;
  int m_a = 0, m_b = 0, m = 0;

  double& z(int i, int h, int k) { return c[static_cast<std::size_t>((i * m_b + h) * m + k)]; }
  double z(int i, int h, int k) const { return c[static_cast<std::size_t>((i * m_b + h) * m + k)]; }
};

/// Raised when a bundle cannot be formed or yields unordered collocation points.
class CompressionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Equally spaced reference initial values; {a_min} when M_a = 1.
Eigen::VectorXd build_grid_a(const GridConfig& cfg);

/// Probability levels of the grid-B columns, equally spaced on [q_lo, q_hi].
std::vector<double> grid_b_levels(const GridConfig& cfg);

/// Row i holds the conditional terminal quantiles of Y(dt) | Y(0) = a_i.
Eigen::MatrixXd build_grid_b(const ModelSpec& model, const Eigen::VectorXd& a, const GridConfig& cfg);

/// Width of each nearest-path bundle, M_a x M_b; filled on request by compress.
struct CompressionDiagnostics {
  Eigen::MatrixXd bundle_width;
};

/// Builds grids A, B and C for one model. For each a_i a batch of paths is simulated;
/// around each b_{h|i} the N paths with the largest terminal below it and the N with the
/// smallest terminal at or above it form the bundle whose integrals give z_{k|i,h} as
/// type-7 quantiles at the levels Phi(xi_k).
/// Throws CompressionError on thin bundles or non-increasing collocation points.
CollocationGrids compress(const ModelSpec& model, const GridConfig& cfg, std::uint64_t seed, unsigned threads = 1,
                          CompressionDiagnostics* diagnostics = nullptr);

/// Grids for one set of dynamics at several horizons. errors[j] is empty when
/// grids[j] is valid and otherwise says why that horizon failed.
struct CompressionBatch {
  std::vector<CollocationGrids> grids;
  std::vector<std::string> errors;
};

/// compress for every horizon in `horizons` (ascending; model.dt_total is ignored),
/// reusing one path set per a_i observed at each horizon.
CompressionBatch compress_horizons(const ModelSpec& model, const GridConfig& cfg, std::span<const double> horizons,
                                   std::uint64_t seed, unsigned threads = 1,
                                   std::vector<CompressionDiagnostics>* diagnostics = nullptr);

/// For each target b: integrals of the 2N paths from Y(0) = a whose terminal values
/// are nearest b (N below, N at or above), sorted ascending. One path set serves
/// all targets. Brute-force reference for single pairs.
std::vector<std::vector<double>> nearest_bundles(const ModelSpec& model, double a, std::span<const double> targets,
                                                 std::size_t n_paths, std::size_t n_neighbors, int n_steps,
                                                 std::uint64_t seed, unsigned threads = 1);

/// Versioned JSON document {"version":1,"family",...,"A","B","C","xi"}.
nlohmann::json grids_to_json(const CollocationGrids& grids, const ModelSpec& model);
CollocationGrids grids_from_json(const nlohmann::json& doc);

/// Model parameters in canonical order followed by dt: ABM/GBM (mu, sigma, dt), CIR (kappa, ybar, gamma, dt).
std::vector<double> model_theta(const ModelSpec& model);

}  // namespace sl
