#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace sl {

struct Interval {
  double lo = 0;
  double hi = 1;
};

/// Latin hypercube design: n points in the box spanned by `ranges`, one point per
/// stratum [k/n, (k+1)/n) in every dimension, independently permuted per dimension.
/// Deterministic given the seed. Throws std::invalid_argument on n < 1 or lo >= hi.
Eigen::MatrixXd latin_hypercube(int n, const std::vector<Interval>& ranges, std::uint64_t seed);

}  // namespace sl
