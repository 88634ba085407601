#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace svlm {

/// Compensated (Kahan) accumulator. Long power-series sums need it: the
/// contracts downstream are at the 1e-12 level while naive summation of
/// 1e5+ terms drifts by ~n*eps.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

/// Prefix sums with compensated accumulation; out[k] = sum of v[0..k].
inline std::vector<double> kahan_prefix(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  KahanSum acc;
  for (std::size_t k = 0; k < v.size(); ++k) {
    acc.add(v[k]);
    out[k] = acc.value();
  }
  return out;
}

/// Splits n*t into its integer part and fractional part. Every module that
/// evaluates the polygonal process at time t must use this one helper so the
/// simulated paths and the exact covariances agree on the same lattice cell.
struct TimeSplit {
  long k;        // floor(n*t)
  double frac;   // {n*t}
};

inline TimeSplit time_split(long n, double t) {
  double x = static_cast<double>(n) * t;
  double fl = std::floor(x);
  return TimeSplit{static_cast<long>(fl), x - fl};
}

inline std::uint64_t next_pow2(std::uint64_t x) {
  std::uint64_t p = 1;
  while (p < x) p <<= 1;
  return p;
}

}  // namespace svlm
