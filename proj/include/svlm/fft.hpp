#pragma once

#include <algorithm>
#include <complex>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "svlm/mathutil.hpp"

namespace svlm {

/// Full linear convolution of two real sequences via zero-padded FFT.
/// Output length is a.size()+b.size()-1.
inline std::vector<double> fft_convolve(const std::vector<double>& a,
                                        const std::vector<double>& b) {
  const std::size_t out_len = a.size() + b.size() - 1;
  const std::size_t P = static_cast<std::size_t>(next_pow2(out_len));
  std::vector<double> pa(P, 0.0), pb(P, 0.0);
  std::copy(a.begin(), a.end(), pa.begin());
  std::copy(b.begin(), b.end(), pb.begin());

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> fa, fb;
  fft.fwd(fa, pa);
  fft.fwd(fb, pb);
  for (std::size_t i = 0; i < P; ++i) fa[i] *= fb[i];
  std::vector<double> full;
  fft.inv(full, fa);
  full.resize(out_len);
  return full;
}

/// Cross-correlation head: c[h] = sum_i a[i] * b[i+h] for h = 0..hmax.
/// Indices are 0-based; the sum runs over all i with both entries in range.
inline std::vector<double> fft_correlate(const std::vector<double>& a,
                                         const std::vector<double>& b, long hmax) {
  std::vector<double> ar(a.rbegin(), a.rend());
  std::vector<double> full = fft_convolve(ar, b);
  // full[a.size()-1 + h] = sum_i a[i] b[i+h]
  std::vector<double> out(static_cast<std::size_t>(hmax) + 1, 0.0);
  for (long h = 0; h <= hmax; ++h) {
    std::size_t idx = a.size() - 1 + static_cast<std::size_t>(h);
    if (idx < full.size()) out[static_cast<std::size_t>(h)] = full[idx];
  }
  return out;
}

}  // namespace svlm
