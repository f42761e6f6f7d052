#include "sevenleague/sampler/interpolation.hpp"

#include <algorithm>
#include <vector>

namespace sl {

std::string to_string(InterpRule rule) { return rule == InterpRule::linear ? "linear" : "quadratic"; }

InterpRule interp_rule_from_string(const std::string& name) {
  if (name == "linear") return InterpRule::linear;
  if (name == "quadratic") return InterpRule::quadratic;
  throw std::invalid_argument("unknown interpolation rule '" + name + "'");
}

double interpolate_1d(std::span<const double> x, std::span<const double> y, double t, InterpRule rule) {
  const std::size_t n = x.size();
  if (n == 0 || y.size() != n) throw std::invalid_argument("interpolate_1d: empty or mismatched nodes");
  if (n == 1) return y[0];
  for (std::size_t j = 1; j < n; ++j) {
    if (!(x[j] > x[j - 1])) throw DegenerateGridError("interpolate_1d: nodes must be strictly increasing");
  }
  // j: left node of the bracketing segment, clamped to the edge segments.
  const auto it = std::upper_bound(x.begin(), x.end(), t);
  std::size_t j = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
  j = std::min(j, n - 2);

  if (rule == InterpRule::linear || n == 2) {
    const double w = (t - x[j]) / (x[j + 1] - x[j]);
    return y[j] + w * (y[j + 1] - y[j]);
  }
  // Of the windows {j-1, j, j+1} and {j, j+1, j+2} take the one whose far node is closer.
  std::size_t s = j;
  if (j + 2 >= n) {
    s = n - 3;
  } else if (j > 0 && t - x[j - 1] < x[j + 2] - t) {
    s = j - 1;
  }
  const double x0 = x[s], x1 = x[s + 1], x2 = x[s + 2];
  const double l0 = (t - x1) * (t - x2) / ((x0 - x1) * (x0 - x2));
  const double l1 = (t - x0) * (t - x2) / ((x1 - x0) * (x1 - x2));
  const double l2 = (t - x0) * (t - x1) / ((x2 - x0) * (x2 - x1));
  return l0 * y[s] + l1 * y[s + 1] + l2 * y[s + 2];
}

RowsAtA interpolate_along_a(const CollocationGrids& grids, double a, InterpRule rule_a) {
  const int m_a = grids.m_a, m_b = grids.m_b, m = grids.m;
  RowsAtA rows;
  rows.m_b = m_b;
  rows.m = m;
  rows.b.resize(static_cast<std::size_t>(m_b));
  rows.c.resize(static_cast<std::size_t>(m_b * m));
  if (m_a == 1) {
    for (int h = 0; h < m_b; ++h) rows.b[static_cast<std::size_t>(h)] = grids.b(0, h);
    std::copy(grids.c.begin(), grids.c.end(), rows.c.begin());
    return rows;
  }
  const std::span<const double> a_nodes(grids.a.data(), static_cast<std::size_t>(m_a));
  rows.extrapolated = a < a_nodes.front() || a > a_nodes.back();
  std::vector<double> column(static_cast<std::size_t>(m_a));
  for (int h = 0; h < m_b; ++h) {
    for (int i = 0; i < m_a; ++i) column[static_cast<std::size_t>(i)] = grids.b(i, h);
    rows.b[static_cast<std::size_t>(h)] = interpolate_1d(a_nodes, column, a, rule_a);
    for (int k = 0; k < m; ++k) {
      for (int i = 0; i < m_a; ++i) column[static_cast<std::size_t>(i)] = grids.z(i, h, k);
      rows.c[static_cast<std::size_t>(h * m + k)] = interpolate_1d(a_nodes, column, a, rule_a);
    }
  }
  return rows;
}

bool interpolate_along_b(const RowsAtA& rows, double b, InterpRule rule_b, Eigen::Ref<Eigen::VectorXd> z) {
  const int m_b = rows.m_b, m = rows.m;
  double row[64];
  if (m_b > 64) throw std::invalid_argument("interpolate_along_b: too many grid-B columns");
  for (int k = 0; k < m; ++k) {
    for (int h = 0; h < m_b; ++h) row[h] = rows.c[static_cast<std::size_t>(h * m + k)];
    z[k] = interpolate_1d(rows.b, std::span<const double>(row, static_cast<std::size_t>(m_b)), b, rule_b);
  }
  return b < rows.b.front() || b > rows.b.back();
}

CpInterpolation interpolate_cps(const CollocationGrids& grids, double a, double b, InterpRule rule_a,
                                InterpRule rule_b) {
  const RowsAtA rows = interpolate_along_a(grids, a, rule_a);
  CpInterpolation out;
  out.z.resize(grids.m);
  out.extrapolated_a = rows.extrapolated;
  out.extrapolated_b = interpolate_along_b(rows, b, rule_b, out.z);
  return out;
}

}  // namespace sl
