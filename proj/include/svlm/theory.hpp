#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "svlm/error.hpp"
#include "svlm/gamma.hpp"
#include "svlm/grid.hpp"
#include "svlm/special.hpp"
#include "svlm/weights.hpp"

namespace svlm {

/// Combined exponent d(r,s) = d(r) + d(s).
inline double d_sum(const SpatialGrid& grid, int i, int j) {
  return grid.d(i) + grid.d(j);
}

/// The long-memory constant c(r,s) = B(1-d(r), d(r)+d(s)-1), evaluated via
/// log-gamma. Equals the integral of x^{-d(r)} (x+1)^{-d(s)} over (0,inf).
inline double c_const(double dr, double ds) {
  if (!(dr > 0.5 && dr < 1.0))
    throw Error(errc::domain_error, "c(r,s) requires 1/2 < d(r) < 1");
  if (!(dr + ds > 1.0))
    throw Error(errc::domain_error, "c(r,s) requires d(r)+d(s) > 1");
  return std::exp(std::lgamma(1.0 - dr) + std::lgamma(dr + ds - 1.0) - std::lgamma(ds));
}

/// Upper bound for c(s): 1/(1-d) + 1/(2d-1).
inline double c_upper_bound(double d) {
  return 1.0 / (1.0 - d) + 1.0 / (2.0 * d - 1.0);
}

/// Cross-covariance gamma_h(r,s) of the process at sites i, j; lag h >= 0.
inline double gamma_h(const SpatialGrid& grid, int i, int j, long h) {
  double s = grid.sigma(i, j);
  if (s == 0.0) return 0.0;
  return s * gamma_series(grid.d(i), grid.d(j), h);
}

/// Leading-order form of gamma_h: c(r,s) sigma(r,s) h^{1-d(r,s)} in the
/// long-memory regime, sigma(r,s) h^{-1} log h at the boundary.
inline double gamma_asymptotic(const SpatialGrid& grid, int i, int j, long h) {
  if (h < 2) throw Error(errc::domain_error, "asymptotic form needs h >= 2");
  double s = grid.sigma(i, j);
  if (s == 0.0) return 0.0;
  double di = grid.d(i), dj = grid.d(j);
  double hd = static_cast<double>(h);
  if (di < 1.0 && dj < 1.0)
    return c_const(di, dj) * s * std::pow(hd, 1.0 - di - dj);
  if (di == 1.0 && dj == 1.0) return s * std::log(hd) / hd;
  throw Error(errc::domain_error, "asymptotic form covered only for LONG and BOUNDARY");
}

/// Limit covariance kernel V((r,t),(s,u)) of the long-memory Gaussian limit.
inline double limit_kernel_V(const SpatialGrid& grid, int i, double t, int j, double u) {
  double di = grid.d(i), dj = grid.d(j);
  if (!(di < 1.0 && dj < 1.0))
    throw Error(errc::domain_error, "V is defined for d in (1/2,1) only");
  if (t < 0.0 || u < 0.0) throw Error(errc::domain_error, "V requires t,u >= 0");
  double drs = di + dj;
  double kap = 3.0 - drs;
  double crs = c_const(di, dj);
  double csr = c_const(dj, di);
  double cross = 0.0;
  if (t != u) {
    double C = (t < u) ? crs : csr;  // C(r,s; t-u)
    cross = C * std::pow(std::abs(t - u), kap);
  }
  double tp = (t == 0.0) ? 0.0 : std::pow(t, kap);
  double up = (u == 0.0) ? 0.0 : std::pow(u, kap);
  return grid.sigma(i, j) / ((2.0 - drs) * kap) * (csr * tp + crs * up - cross);
}

/// Wiener kernel sigma(r,s) min(t,u): the limit covariance at the boundary
/// and in the short-memory regime.
inline double wiener_kernel(const SpatialGrid& grid, int i, double t, int j, double u) {
  return grid.sigma(i, j) * std::min(t, u);
}

/// Fractional Brownian motion covariance with Hurst parameter H.
inline double fbm_kernel(double H, double t, double u) {
  if (!(H > 0.0 && H < 1.0)) throw Error(errc::domain_error, "fBm requires 0 < H < 1");
  double a = (t == 0.0) ? 0.0 : std::pow(t, 2.0 * H);
  double b = (u == 0.0) ? 0.0 : std::pow(u, 2.0 * H);
  double c = (t == u) ? 0.0 : std::pow(std::abs(t - u), 2.0 * H);
  return 0.5 * (a + b - c);
}

/// Exact second-moment engine for partial sums and polygonal paths on a
/// grid. Builds lag-covariance tables for every ordered site pair once (one
/// FFT cross-correlation each), after which every covariance query is a few
/// prefix-sum lookups. With `horizon` set the tables describe the
/// J-truncated process instead of the full one.
class CovCalculator {
 public:
  CovCalculator(const SpatialGrid& grid, long hmax, std::optional<long> horizon = {})
      : grid_(grid), hmax_(hmax), horizon_(horizon) {
    for (int i = 0; i < grid.size(); ++i)
      for (int j = 0; j < grid.size(); ++j) {
        auto key = std::make_pair(grid.d(i), grid.d(j));
        if (tables_.count(key)) continue;
        tables_.emplace(key, horizon ? build_gamma_table_truncated(key.first, key.second,
                                                                   hmax, *horizon)
                                     : build_gamma_table(key.first, key.second, hmax));
      }
  }

  const SpatialGrid& grid() const { return grid_; }
  long hmax() const { return hmax_; }
  std::optional<long> horizon() const { return horizon_; }

  /// gamma_h(i,j) including the sigma factor; negative lags flip the pair.
  double gamma(int i, int j, long h) const {
    if (h >= 0) return grid_.sigma(i, j) * table(i, j).value(h);
    return grid_.sigma(i, j) * table(j, i).value(-h);
  }

  /// sum_{h=a}^{b} gamma_h(i,j) over a signed lag range.
  double gamma_range(int i, int j, long a, long b) const {
    if (a > b) return 0.0;
    double s = grid_.sigma(i, j);
    if (s == 0.0) return 0.0;
    double total = 0.0;
    if (a < 0) total += table(j, i).range_sum(std::max(1L, -std::min(b, -1L)), -a);
    if (b >= 0) total += table(i, j).range_sum(std::max(a, 0L), b);
    return s * total;
  }

  /// E[S_m(r) S_l(s)] with S the partial sums at sites i, j.
  double partial_sum_cov(int i, int j, long m, long l) const {
    if (m <= 0 || l <= 0) return 0.0;
    double s = grid_.sigma(i, j);
    if (s == 0.0) return 0.0;
    return s * (one_sided(table(i, j), m, l) + one_sided_from(table(j, i), l, m));
  }

  /// E[zeta_n(r,t) zeta_n(s,u)] assembled exactly from the partial-sum term
  /// plus the three fractional-cell cross terms.
  double polygonal_cov(int i, int j, long n, double t, double u) const {
    check_time(t);
    check_time(u);
    TimeSplit a = time_split(n, t), b = time_split(n, u);
    double total = partial_sum_cov(i, j, a.k, b.k);
    if (b.frac != 0.0 && a.k > 0)
      total += b.frac * gamma_range(i, j, b.k + 1 - a.k, b.k);
    if (a.frac != 0.0 && b.k > 0)
      total += a.frac * gamma_range(j, i, a.k + 1 - b.k, a.k);
    if (a.frac != 0.0 && b.frac != 0.0)
      total += a.frac * b.frac * gamma(i, j, b.k - a.k);
    return total;
  }

  /// E[(S_{a+w} - S_a)^2] at site i; stationary, so it depends on w only.
  double increment_var(int i, long w) const { return partial_sum_cov(i, i, w, w); }

  /// E[(zeta_n(s,t) - zeta_n(s,u))^2] at site i.
  double polygonal_increment_sq(int i, long n, double t, double u) const {
    TimeSplit a = time_split(n, t), b = time_split(n, u);
    if (a.frac == 0.0 && b.frac == 0.0)
      return increment_var(i, std::abs(a.k - b.k));
    return polygonal_cov(i, i, n, t, t) - 2.0 * polygonal_cov(i, i, n, t, u) +
           polygonal_cov(i, i, n, u, u);
  }

 private:
  static void check_time(double t) {
    if (t < 0.0 || t > 1.0)
      throw Error(errc::time_out_of_range, "polygonal time must lie in [0,1]");
  }

  const GammaTable& table(int i, int j) const {
    return tables_.at(std::make_pair(grid_.d(i), grid_.d(j)));
  }

  // sum_{h=0}^{l-1} min(m, l-h) g[h]
  static double one_sided(const GammaTable& tab, long m, long l) {
    if (m >= l) return static_cast<double>(l) * tab.range_sum(0, l - 1) -
                       tab.weighted_range_sum(0, l - 1);
    double out = static_cast<double>(m) * tab.range_sum(0, l - m);
    out += static_cast<double>(l) * tab.range_sum(l - m + 1, l - 1) -
           tab.weighted_range_sum(l - m + 1, l - 1);
    return out;
  }

  // sum_{k=1}^{m-1} min(l, m-k) g[k]
  static double one_sided_from(const GammaTable& tab, long l, long m) {
    if (m <= 1) return 0.0;
    // min(l, m-k): constant l for k <= m-l, then linear.
    if (l >= m) return static_cast<double>(m) * tab.range_sum(1, m - 1) -
                       tab.weighted_range_sum(1, m - 1);
    double out = static_cast<double>(l) * tab.range_sum(1, m - l);
    out += static_cast<double>(m) * tab.range_sum(m - l + 1, m - 1) -
           tab.weighted_range_sum(m - l + 1, m - 1);
    return out;
  }

  const SpatialGrid& grid_;
  long hmax_;
  std::optional<long> horizon_;
  std::map<std::pair<double, double>, GammaTable> tables_;
};

/// One-shot versions for small m, l. Heavier studies should hold a
/// CovCalculator so the tables are built once.
inline double exact_partial_sum_cov(const SpatialGrid& grid, int i, int j, long m, long l) {
  if (m <= 0 || l <= 0) return 0.0;
  CovCalculator calc(grid, std::max(m, l) + 1);
  return calc.partial_sum_cov(i, j, m, l);
}

inline double exact_polygonal_cov(const SpatialGrid& grid, int i, int j, long n,
                                  double t, double u) {
  CovCalculator calc(grid, n + 2);
  return calc.polygonal_cov(i, j, n, t, u);
}

/// Leading-order prediction of E[S_{floor(nt)}(r) S_{floor(nu)}(s)]:
/// V((r,t),(s,u)) n^{3-d(r,s)} in the long regime, sigma min(t,u) n log^2 n
/// at the boundary.
inline double asymptotic_prediction(const SpatialGrid& grid, int i, int j, long n,
                                    double t, double u, const Regime& regime) {
  if (regime.kind == RegimeKind::Long)
    return limit_kernel_V(grid, i, t, j, u) *
           std::pow(static_cast<double>(n), 3.0 - d_sum(grid, i, j));
  if (regime.kind == RegimeKind::Boundary) {
    double ln = std::log(static_cast<double>(n));
    return grid.sigma(i, j) * std::min(t, u) * static_cast<double>(n) * ln * ln;
  }
  throw Error(errc::domain_error, "no leading-order prediction in the SHORT regime");
}

/// Long-run covariance sum_{h=-inf}^{inf} gamma_h(r,s) =
/// sigma(r,s) zeta(d(r)) zeta(d(s)); requires d > 1 at both sites.
inline double longrun_cov(const SpatialGrid& grid, int i, int j) {
  if (!(grid.d(i) > 1.0 && grid.d(j) > 1.0))
    throw Error(errc::domain_error, "long-run covariance requires d > 1 at both sites");
  double s = grid.sigma(i, j);
  if (s == 0.0) return 0.0;
  return s * riemann_zeta(grid.d(i)) * riemann_zeta(grid.d(j));
}

/// Truncation-consistent variant with the coefficient sums cut at J.
inline double longrun_cov_truncated(const SpatialGrid& grid, int i, int j, long J) {
  double s = grid.sigma(i, j);
  if (s == 0.0) return 0.0;
  return s * zeta_partial(grid.d(i), J) * zeta_partial(grid.d(j), J);
}

}  // namespace svlm
