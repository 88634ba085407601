#pragma once

#include <cmath>
#include <limits>

#include "svlm/error.hpp"
#include "svlm/mathutil.hpp"

namespace svlm {

inline double log_beta(double x, double y) {
  return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y);
}

inline double beta_fn(double x, double y) { return std::exp(log_beta(x, y)); }

/// Tail of the Hurwitz zeta function: sum_{i>=N} i^{-s} for s > 1.
/// Euler-Maclaurin with Bernoulli corrections through B8; the first omitted
/// term bounds the error, which for N >= 64 and s <= ~100 is far below 1e-16
/// relative.
inline double hurwitz_zeta_tail(double s, double N) {
  double tail = std::pow(N, 1.0 - s) / (s - 1.0)   // integral
                + 0.5 * std::pow(N, -s);           // boundary
  double p = s * std::pow(N, -s - 1.0);
  tail += p / 12.0;                                           // B2
  p *= (s + 1.0) * (s + 2.0) / (N * N);
  tail -= p / 720.0;                                          // B4
  p *= (s + 3.0) * (s + 4.0) / (N * N);
  tail += p / 30240.0;                                        // B6
  p *= (s + 5.0) * (s + 6.0) / (N * N);
  tail -= p / 1209600.0;                                      // B8
  return tail;
}

/// Riemann zeta for s > 1 by direct summation plus the Euler-Maclaurin tail.
inline double riemann_zeta(double s) {
  if (!(s > 1.0)) throw Error(errc::domain_error, "zeta(s) requires s > 1");
  const long N = 2048;
  KahanSum acc;
  for (long i = 1; i < N; ++i) acc.add(std::pow(static_cast<double>(i), -s));
  return acc.value() + hurwitz_zeta_tail(s, static_cast<double>(N));
}

/// Truncated zeta: sum_{j=0}^{J} (j+1)^{-d} = sum_{i=1}^{J+1} i^{-d}.
inline double zeta_partial(double d, long J) {
  KahanSum acc;
  for (long i = 1; i <= J + 1; ++i) acc.add(std::pow(static_cast<double>(i), -d));
  return acc.value();
}

/// Tail of the cross-coefficient series: sum_{i>=N} i^{-dr} (i+h)^{-ds}.
///
/// Expands (1+h/i)^{-ds} binomially; each order reduces to a Hurwitz zeta
/// tail. Requires N >= 4(h+1): successive terms then shrink by at least ~1/2,
/// so the remainder after the last retained term is bounded by that term.
/// Terms are built by ratio recursion to keep h^k out of the arithmetic.
inline double power_product_tail(double dr, double ds, long h, double N,
                                 double abs_tol = 0.0) {
  KahanSum acc;
  const double hd = static_cast<double>(h);
  double z_prev = hurwitz_zeta_tail(dr + ds, N);
  double term = z_prev;
  acc.add(term);
  if (h == 0) return acc.value();
  for (int k = 1; k <= 300; ++k) {
    double z = hurwitz_zeta_tail(dr + ds + k, N);
    if (!(z > 0.0)) break;  // underflow; the rest is negligible
    term *= -(ds + static_cast<double>(k) - 1.0) / static_cast<double>(k) * hd *
            (z / z_prev);
    z_prev = z;
    acc.add(term);
    if (std::abs(term) <= std::max(abs_tol, 1e-18 * std::abs(acc.value())))
      return acc.value();
  }
  return acc.value();
}

/// Survival function of the Kolmogorov distribution:
/// Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
inline double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.15) return 1.0;  // series is slow and the answer is 1 to 15 digits
  double s = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    double term = sign * std::exp(-2.0 * k * k * x * x);
    s += term;
    if (std::abs(term) < 1e-18) break;
    sign = -sign;
  }
  double q = 2.0 * s;
  if (q < 0.0) q = 0.0;
  if (q > 1.0) q = 1.0;
  return q;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace svlm
