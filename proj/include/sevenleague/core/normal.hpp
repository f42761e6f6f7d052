#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sl {

/// Standard normal density.
template <typename Scalar>
inline Scalar std_normal_pdf(Scalar x) {
  return std::exp(Scalar(-0.5) * x * x) / std::sqrt(Scalar(2) * std::numbers::pi_v<Scalar>);
}

/// Standard normal CDF, evaluated through erfc so both tails keep full relative accuracy.
template <typename Scalar>
inline Scalar std_normal_cdf(Scalar x) {
  return Scalar(0.5) * std::erfc(-x / std::numbers::sqrt2_v<Scalar>);
}

namespace detail {

// Acklam's rational approximation of the normal quantile, relative error ~1.15e-9.
template <typename Scalar>
inline Scalar acklam_quantile(Scalar p) {
  constexpr Scalar a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                          1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  constexpr Scalar b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                          6.680131188771972e+01,  -1.328068155288572e+01};
  constexpr Scalar c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                          -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  constexpr Scalar d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                          3.754408661907416e+00};
  constexpr Scalar p_low = 0.02425;
  constexpr Scalar p_high = 1 - p_low;

  if (p < p_low) {
    const Scalar q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p <= p_high) {
    const Scalar q = p - Scalar(0.5);
    const Scalar r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  }
  const Scalar q = std::sqrt(-2 * std::log1p(-p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
}

}  // namespace detail

/// Inverse of the standard normal CDF: Acklam's approximation followed by one Newton step.
/// Throws std::domain_error outside the open interval (0, 1).
template <typename Scalar>
inline Scalar std_normal_inv_cdf(Scalar p) {
  if (!(p > Scalar(0) && p < Scalar(1))) {
    throw std::domain_error("std_normal_inv_cdf: probability must lie in (0, 1)");
  }
  Scalar x = detail::acklam_quantile(p);
  // Phi(x) - p, evaluated in the tail nearer to x so it keeps its relative accuracy.
  const Scalar residual = x > 0 ? (Scalar(1) - p) - std_normal_cdf(-x) : std_normal_cdf(x) - p;
  x -= residual / std_normal_pdf(x);
  return x;
}

/// Fast normal quantile without the refinement step; used to turn uniforms into Gaussian draws.
template <typename Scalar>
inline Scalar fast_normal_quantile(Scalar p) {
  return detail::acklam_quantile(p);
}

}  // namespace sl
