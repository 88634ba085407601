#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "svlm/error.hpp"
#include "svlm/fft.hpp"
#include "svlm/mathutil.hpp"
#include "svlm/special.hpp"

namespace svlm {

/// Guaranteed absolute accuracy of series evaluations, relative to the
/// leading term (h+1)^{-ds}.
inline constexpr double kEpsSeries = 1e-12;

/// Pointwise evaluation of the cross-covariance series
///   sum_{j>=0} (j+1)^{-dr} (j+h+1)^{-ds}   (the sigma factor is excluded).
///
/// Direct compensated summation to a crossover index N ~ 4(h+1), then the
/// analytic tail from power_product_tail. The result carries absolute error
/// <= kEpsSeries * (h+1)^{-ds}.
inline double gamma_series(double dr, double ds, long h) {
  if (h < 0) throw Error(errc::domain_error, "gamma_series requires h >= 0");
  if (!(dr + ds > 1.0))
    throw Error(errc::domain_error, "gamma series diverges for d(r)+d(s) <= 1");
  const long N = std::max(2048L, 4 * (h + 1));
  const double hd = static_cast<double>(h);
  KahanSum acc;
  for (long i = 1; i < N; ++i) {
    double x = static_cast<double>(i);
    acc.add(std::pow(x, -dr) * std::pow(x + hd, -ds));
  }
  double leading = std::pow(hd + 1.0, -ds);
  double tail = power_product_tail(dr, ds, h, static_cast<double>(N),
                                   0.25 * kEpsSeries * leading);
  return acc.value() + tail;
}

/// Truncated-series value: sum_{j=0}^{J-h} (j+1)^{-dr} (j+h+1)^{-ds},
/// the lag-h covariance of the J-truncated moving average. Zero for h > J.
inline double gamma_series_truncated(double dr, double ds, long h, long J) {
  if (h < 0) throw Error(errc::domain_error, "gamma_series_truncated requires h >= 0");
  if (h > J) return 0.0;
  KahanSum acc;
  const double hd = static_cast<double>(h);
  for (long i = 1; i <= J + 1 - h; ++i) {
    double x = static_cast<double>(i);
    acc.add(std::pow(x, -dr) * std::pow(x + hd, -ds));
  }
  return acc.value();
}

/// Batched table of series values g[h] for h = 0..hmax at one ordered
/// exponent pair (dr, ds), with compensated prefix sums of g[h] and h*g[h].
///
/// The head sum_{i<=L} i^{-dr}(i+h)^{-ds} is one FFT cross-correlation of
/// power arrays; the tail beyond L is the same binomial/Hurwitz expansion as
/// the pointwise route, evaluated per h at O(1) cost. With L >= 4(hmax+1)
/// the table matches gamma_series to ~1e-12 absolute, which the tests pin.
///
/// When `horizon` is set the table instead holds the exact finite sums of
/// the J-truncated process (no tail).
struct GammaTable {
  double dr = 0.0, ds = 0.0;
  long hmax = 0;
  std::optional<long> horizon;  // J for truncated tables
  std::vector<double> g;        // g[h]
  std::vector<double> pre;      // pre[h]  = sum_{h'=0..h} g[h']
  std::vector<double> hpre;     // hpre[h] = sum_{h'=0..h} h' * g[h']

  double value(long h) const {
    if (h < 0 || h > hmax) throw Error(errc::domain_error, "gamma table index out of range");
    return g[static_cast<std::size_t>(h)];
  }

  /// sum_{h=a}^{b} g[h]; empty when a > b.
  double range_sum(long a, long b) const {
    if (a > b) return 0.0;
    if (a < 0 || b > hmax) throw Error(errc::domain_error, "gamma range out of table");
    double hi = pre[static_cast<std::size_t>(b)];
    return a == 0 ? hi : hi - pre[static_cast<std::size_t>(a - 1)];
  }

  /// sum_{h=a}^{b} h * g[h].
  double weighted_range_sum(long a, long b) const {
    if (a > b) return 0.0;
    if (a < 0 || b > hmax) throw Error(errc::domain_error, "gamma range out of table");
    double hi = hpre[static_cast<std::size_t>(b)];
    return a == 0 ? hi : hi - hpre[static_cast<std::size_t>(a - 1)];
  }
};

namespace detail {

inline void finish_table(GammaTable& tab) {
  tab.pre = kahan_prefix(tab.g);
  std::vector<double> hg(tab.g.size());
  for (std::size_t h = 0; h < tab.g.size(); ++h) hg[h] = static_cast<double>(h) * tab.g[h];
  tab.hpre = kahan_prefix(hg);
}

inline std::vector<double> power_array(double expo, long len) {
  std::vector<double> a(static_cast<std::size_t>(len));
  for (long i = 0; i < len; ++i)
    a[static_cast<std::size_t>(i)] = std::pow(static_cast<double>(i + 1), -expo);
  return a;
}

}  // namespace detail

inline GammaTable build_gamma_table(double dr, double ds, long hmax) {
  if (!(dr + ds > 1.0))
    throw Error(errc::domain_error, "gamma series diverges for d(r)+d(s) <= 1");
  GammaTable tab;
  tab.dr = dr;
  tab.ds = ds;
  tab.hmax = hmax;
  const long L = std::max(4 * (hmax + 1), 8192L);
  std::vector<double> A = detail::power_array(dr, L);           // i^{-dr}, i=1..L
  std::vector<double> B = detail::power_array(ds, L + hmax);    // i^{-ds}, i=1..L+hmax
  tab.g = fft_correlate(A, B, hmax);

  // Analytic tails beyond L, per h. The Hurwitz zeta tails are shared across
  // h; per-h terms are built by ratio recursion so neither h^k nor the
  // underflowing zeta factors are ever formed on their own.
  const double N = static_cast<double>(L + 1);
  std::vector<double> zv;  // zeta_tail(dr+ds+k, N), k = 0,1,...
  for (int k = 0; k <= 120; ++k) {
    double z = hurwitz_zeta_tail(dr + ds + k, N);
    if (!(z > 0.0)) break;  // underflow: everything beyond is negligible
    zv.push_back(z);
  }
  for (long h = 0; h <= hmax; ++h) {
    double hd = static_cast<double>(h);
    double term = zv[0];
    KahanSum tail;
    tail.add(term);
    for (std::size_t k = 1; k < zv.size(); ++k) {
      term *= -(ds + static_cast<double>(k) - 1.0) / static_cast<double>(k) * hd *
              (zv[k] / zv[k - 1]);
      tail.add(term);
      if (std::abs(term) < 1e-18 * std::abs(tail.value()) + 1e-300) break;
    }
    tab.g[static_cast<std::size_t>(h)] += tail.value();
  }
  detail::finish_table(tab);
  return tab;
}

/// Exact lag covariances of the J-truncated moving average:
/// g[h] = sum_{i=1}^{J+1-h} i^{-dr} (i+h)^{-ds}, h = 0..hmax.
inline GammaTable build_gamma_table_truncated(double dr, double ds, long hmax, long J) {
  GammaTable tab;
  tab.dr = dr;
  tab.ds = ds;
  tab.hmax = hmax;
  tab.horizon = J;
  std::vector<double> A = detail::power_array(dr, J + 1);
  std::vector<double> B = detail::power_array(ds, J + 1);
  long heff = std::min(hmax, J);
  tab.g = fft_correlate(A, B, heff);
  tab.g.resize(static_cast<std::size_t>(hmax) + 1, 0.0);
  detail::finish_table(tab);
  return tab;
}

}  // namespace svlm
