#include "sevenleague/core/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sl {

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("quantile: level outside [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double empirical_quantile(std::span<const double> samples, double p) {
  if (samples.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  return quantile_sorted(sorted, p);
}

double cdf_sup_distance(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("cdf_sup_distance: empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double sup = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double f = cdf(sorted[i]);
    sup = std::max({sup, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(j) / n - f)});
    i = j;
  }
  return sup;
}

double cdf_sup_distance(std::span<const double> samples_a, std::span<const double> samples_b) {
  if (samples_a.empty() || samples_b.empty()) throw std::invalid_argument("cdf_sup_distance: empty sample");
  std::vector<double> a(samples_a.begin(), samples_a.end());
  std::vector<double> b(samples_b.begin(), samples_b.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double sup = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  // Past the end of one sample the other CDF only climbs towards 1; the gap is largest here.
  if (i < a.size()) sup = std::max(sup, std::abs(static_cast<double>(i) / na - 1.0));
  if (j < b.size()) sup = std::max(sup, std::abs(1.0 - static_cast<double>(j) / nb));
  return sup;
}

int isotonic_nondecreasing(std::span<double> values) {
  struct Block {
    double sum;
    std::size_t count;
    double mean() const { return sum / static_cast<double>(count); }
  };
  std::vector<Block> blocks;
  blocks.reserve(values.size());
  int pools = 0;
  for (double v : values) {
    blocks.push_back({v, 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
      Block last = blocks.back();
      blocks.pop_back();
      blocks.back().sum += last.sum;
      blocks.back().count += last.count;
      ++pools;
    }
  }
  std::size_t pos = 0;
  for (const Block& b : blocks) {
    for (std::size_t c = 0; c < b.count; ++c) values[pos++] = b.mean();
  }
  return pools;
}

Moments sample_moments(std::span<const double> samples) {
  Moments m;
  if (samples.empty()) return m;
  double sum = 0.0;
  for (double x : samples) sum += x;
  m.mean = sum / static_cast<double>(samples.size());
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double x : samples) ss += (x - m.mean) * (x - m.mean);
    m.variance = ss / static_cast<double>(samples.size() - 1);
  }
  return m;
}

}  // namespace sl
