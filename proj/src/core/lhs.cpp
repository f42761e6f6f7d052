#include "sevenleague/core/lhs.hpp"

#include <numeric>
#include <stdexcept>

#include "sevenleague/core/random.hpp"

namespace sl {

Eigen::MatrixXd latin_hypercube(int n, const std::vector<Interval>& ranges, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("latin_hypercube: n must be positive");
  for (const auto& r : ranges) {
    if (!(r.lo < r.hi)) throw std::invalid_argument("latin_hypercube: each range needs lo < hi");
  }
  const auto d = static_cast<Eigen::Index>(ranges.size());
  Eigen::MatrixXd design(n, d);
  std::vector<int> strata(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < d; ++j) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(j)));
    std::iota(strata.begin(), strata.end(), 0);
    // Fisher-Yates with our own engine keeps designs identical across standard libraries.
    for (int i = n - 1; i > 0; --i) {
      const auto k = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
      std::swap(strata[static_cast<std::size_t>(i)], strata[static_cast<std::size_t>(k)]);
    }
    const auto& r = ranges[static_cast<std::size_t>(j)];
    for (int i = 0; i < n; ++i) {
      const double u = (strata[static_cast<std::size_t>(i)] + rng.uniform()) / n;
      design(i, j) = r.lo + (r.hi - r.lo) * u;
    }
  }
  return design;
}

}  // namespace sl
