#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sl {

/// Type-7 quantile of already sorted data: linear interpolation between the order
/// statistics around h = (n - 1) p.
double quantile_sorted(std::span<const double> sorted, double p);

/// Type-7 quantile of an unsorted sample. Throws std::invalid_argument on empty input.
double empirical_quantile(std::span<const double> samples, double p);

/// One-sample Kolmogorov statistic sup_x |F_n(x) - cdf(x)| against a continuous
/// CDF, checked on both sides of every jump of the empirical CDF.
double cdf_sup_distance(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Two-sample statistic sup_x |F_a(x) - F_b(x)| between two empirical CDFs.
double cdf_sup_distance(std::span<const double> samples_a, std::span<const double> samples_b);

/// One trapezoid increment of a running integral.
inline double trapezoid_step(double prev_integral, double f_prev, double f_next, double dt) {
  return prev_integral + 0.5 * dt * (f_prev + f_next);
}

/// Least-squares non-decreasing fit (pool adjacent violators). Returns the number
/// of pooling operations performed; 0 means the input was already ordered.
int isotonic_nondecreasing(std::span<double> values);

struct Moments {
  double mean = 0;
  double variance = 0;
};

/// Sample mean and unbiased variance.
Moments sample_moments(std::span<const double> samples);

}  // namespace sl
