#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "svlm/mathutil.hpp"
#include "svlm/special.hpp"

namespace svlm {

/// Zero-mean empirical covariance (1/R) sum_r x_r x_r^T, reduced in
/// replication order so the result is independent of how the rows were
/// produced.
inline Eigen::MatrixXd empirical_cov(const Eigen::MatrixXd& draws) {
  const long R = draws.rows();
  const int P = static_cast<int>(draws.cols());
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(P, P);
  for (long r = 0; r < R; ++r) C += draws.row(r).transpose() * draws.row(r);
  return C / static_cast<double>(R);
}

/// Monte Carlo standard error of the (p,q) covariance entry under the
/// Gaussian fourth-moment identity: Var = (c_pp c_qq + c_pq^2)/R.
inline double cov_stderr(const Eigen::MatrixXd& ref, long R, int p, int q) {
  return std::sqrt((ref(p, p) * ref(q, q) + ref(p, q) * ref(p, q)) /
                   static_cast<double>(R));
}

struct KsResult {
  double statistic = 0.0;  // sup-distance D_R
  double lambda = 0.0;     // finite-sample adjusted sqrt(R)-scaled statistic
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test of `samples` against the standard
/// normal after dividing by sqrt(variance). Uses the asymptotic distribution
/// of the sup-distance with the Stephens finite-sample adjustment.
inline KsResult ks_test_normal(std::vector<double> samples, double variance) {
  const double sd = std::sqrt(variance);
  std::sort(samples.begin(), samples.end());
  const std::size_t R = samples.size();
  double d = 0.0;
  for (std::size_t i = 0; i < R; ++i) {
    double F = normal_cdf(samples[i] / sd);
    double lo = static_cast<double>(i) / static_cast<double>(R);
    double hi = static_cast<double>(i + 1) / static_cast<double>(R);
    d = std::max(d, std::max(F - lo, hi - F));
  }
  double sq = std::sqrt(static_cast<double>(R));
  KsResult res;
  res.statistic = d;
  res.lambda = (sq + 0.12 + 0.11 / sq) * d;
  res.p_value = kolmogorov_sf(res.lambda);
  return res;
}

}  // namespace svlm
