#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sevenleague/compression/compression.hpp"

namespace sl {

/// Linear uses the bracketing pair of nodes, quadratic the three nearest nodes.
/// Both continue the edge piece beyond the node range.
enum class InterpRule { linear, quadratic };

std::string to_string(InterpRule rule);
InterpRule interp_rule_from_string(const std::string& name);

class DegenerateGridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Value at t of the piecewise interpolant through (x_j, y_j), x strictly increasing.
/// A single node gives a constant; two nodes reduce the quadratic rule to the linear one.
double interpolate_1d(std::span<const double> x, std::span<const double> y, double t, InterpRule rule);

/// Grids B and C interpolated along grid A at one initial value.
struct RowsAtA {
  std::vector<double> b;  // M_b conditional reference values B(a)
  std::vector<double> c;  // M_b x M collocation rows, row-major
  int m_b = 0, m = 0;
  bool extrapolated = false;
};

RowsAtA interpolate_along_a(const CollocationGrids& grids, double a, InterpRule rule_a);

/// Second stage: each collocation row against B(a) at b, written to `z` (size M).
/// Returns true when b lies outside B(a).
bool interpolate_along_b(const RowsAtA& rows, double b, InterpRule rule_b, Eigen::Ref<Eigen::VectorXd> z);

struct CpInterpolation {
  Eigen::VectorXd z;          // M interpolated collocation points
  bool extrapolated_a = false;
  bool extrapolated_b = false;
};

/// Collocation points at an arbitrary (a, b): first every C(., h, k) and B(., h)
/// along grid A at a, then each resulting row against the interpolated B(a) at b.
/// Throws DegenerateGridError on repeated nodes.
CpInterpolation interpolate_cps(const CollocationGrids& grids, double a, double b, InterpRule rule_a, InterpRule rule_b);

}  // namespace sl
