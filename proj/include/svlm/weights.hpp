#pragma once

#include <cmath>

#include "svlm/error.hpp"
#include "svlm/mathutil.hpp"

namespace svlm {

/// Moving-average coefficient v_j(s) = (j+1)^{-d} for j >= 0, zero for j < 0.
inline double coeff(long j, double d) {
  if (j < 0) return 0.0;
  return std::pow(static_cast<double>(j + 1), -d);
}

/// Polygonal weight a_nj(s,t) = sum_{k=1}^{floor(nt)} v_{k-j} + {nt} v_{floor(nt)+1-j}.
/// Vanishes for j > floor(nt)+1.
inline double weight_a(long n, long j, double d, double t) {
  if (n < 1) throw Error(errc::domain_error, "weight_a requires n >= 1");
  TimeSplit ts = time_split(n, t);
  KahanSum acc;
  for (long k = std::max(1L, j); k <= ts.k; ++k) acc.add(coeff(k - j, d));
  acc.add(ts.frac * coeff(ts.k + 1 - j, d));
  return acc.value();
}

/// sup_j a_nj(s,t), attained at j = 1.
inline double weight_a_sup(long n, double d, double t) { return weight_a(n, 1, d, t); }

/// Truncation plan for realizing the infinite moving-average past with a
/// finite pre-sample of J innovations. abs_tail_bound is the analytic bound
/// sigma^2 J^{1-2d}/(2d-1) on the variance left in the discarded tail.
struct TruncationPlan {
  long horizon = 0;            // J
  double abs_tail_bound = 0.0;
  double tol = 0.0;
};

inline constexpr long kDefaultHorizonCap = 100000000L;  // 1e8

inline double truncation_tail_bound(double d, double sigma2, long J) {
  return sigma2 * std::pow(static_cast<double>(J), 1.0 - 2.0 * d) / (2.0 * d - 1.0);
}

/// Smallest J (up to rounding) with sigma^2 J^{1-2d}/(2d-1) <= tol.
/// Solved in log space; d near 1/2 makes J astronomically large, which is
/// reported as HorizonOverflow rather than silently biasing simulations.
inline TruncationPlan truncation_horizon(double d, double sigma2, double tol,
                                         long j_max = kDefaultHorizonCap) {
  if (!(d > 0.5)) throw Error(errc::domain_error, "truncation_horizon requires d > 1/2");
  if (!(tol > 0.0)) throw Error(errc::domain_error, "truncation tolerance must be positive");
  if (sigma2 == 0.0) return TruncationPlan{1, 0.0, tol};
  double logJ = std::log(sigma2 / ((2.0 * d - 1.0) * tol)) / (2.0 * d - 1.0);
  if (logJ > std::log(static_cast<double>(j_max)))
    throw Error(errc::horizon_overflow,
                "required horizon exceeds cap (d too close to 1/2 for this tolerance)");
  long J = std::max(1L, static_cast<long>(std::ceil(std::exp(logJ) - 1e-9)));
  const double slack = 1.0 + 1e-12;  // absorb pow() rounding at the exact solution
  while (truncation_tail_bound(d, sigma2, J) > tol * slack) ++J;
  while (J > 1 && truncation_tail_bound(d, sigma2, J - 1) <= tol * slack) --J;
  return TruncationPlan{J, truncation_tail_bound(d, sigma2, J), tol};
}

/// Regime normalizer z_n(s): n^{3/2-d} for 1/2<d<1, sqrt(n) log n at d=1,
/// sqrt(n) for d>1. Natural logarithm throughout.
inline double normalizer_z(long n, double d) {
  if (d == 1.0) {
    if (n < 2)
      throw Error(errc::degenerate_normalizer, "sqrt(n) log n degenerates for n < 2");
    return std::sqrt(static_cast<double>(n)) * std::log(static_cast<double>(n));
  }
  if (n < 1) throw Error(errc::domain_error, "normalizer_z requires n >= 1");
  if (d < 1.0) return std::pow(static_cast<double>(n), 1.5 - d);
  return std::sqrt(static_cast<double>(n));
}

}  // namespace svlm
