#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "svlm/error.hpp"
#include "svlm/mathutil.hpp"

namespace svlm {

/// PSD slack for innovation covariances and kernel Gram matrices, relative
/// to the trace.
inline constexpr double kEpsPsd = 1e-10;

/// Width of the guard band around the singular exponents d = 1/2 and d = 1.
inline constexpr double kDeltaSing = 1e-3;

enum class RegimeKind { Long, Boundary, Short };

inline const char* regime_name(RegimeKind k) {
  switch (k) {
    case RegimeKind::Long: return "LONG";
    case RegimeKind::Boundary: return "BOUNDARY";
    case RegimeKind::Short: return "SHORT";
  }
  return "?";
}

struct Regime {
  RegimeKind kind;
  double d_min;
  double d_max;
};

/// Raw grid description, before validation.
struct GridSpec {
  std::vector<double> points;   // 1-D site coordinates
  std::vector<double> weights;  // quadrature weights approximating mu
  std::vector<double> d;        // memory exponents d(s_i)
  Eigen::MatrixXd innov_cov;    // innovation covariance sigma(r,s)
};

/// Discretized measure space with its memory-exponent field and innovation
/// covariance. Immutable after construction; safe to share across threads.
class SpatialGrid {
 public:
  SpatialGrid(std::vector<double> points, std::vector<double> weights,
              std::vector<double> d, Eigen::MatrixXd cov, double min_eig)
      : points_(std::move(points)),
        weights_(std::move(weights)),
        d_(std::move(d)),
        cov_(std::move(cov)),
        min_cov_eig_(min_eig) {}

  int size() const { return static_cast<int>(points_.size()); }
  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& d_values() const { return d_; }
  double d(int i) const { return d_[static_cast<std::size_t>(i)]; }
  double weight(int i) const { return weights_[static_cast<std::size_t>(i)]; }
  double point(int i) const { return points_[static_cast<std::size_t>(i)]; }
  const Eigen::MatrixXd& innov_cov() const { return cov_; }
  double sigma(int i, int j) const { return cov_(i, j); }
  double sigma2(int i) const { return cov_(i, i); }
  double min_cov_eig() const { return min_cov_eig_; }

 private:
  std::vector<double> points_;
  std::vector<double> weights_;
  std::vector<double> d_;
  Eigen::MatrixXd cov_;
  double min_cov_eig_;
};

/// Validates a grid description. Checks, in order: shape consistency,
/// weight positivity, exponent range d > 1/2, covariance symmetry,
/// Cauchy-Schwarz |sigma(r,s)| <= sigma(r)sigma(s), and PSD up to
/// -kEpsPsd * trace.
inline SpatialGrid build_grid(const GridSpec& spec) {
  const std::size_t m = spec.points.size();
  if (m == 0) throw Error(errc::config_error, "grid has no points");
  if (spec.weights.size() != m || spec.d.size() != m ||
      spec.innov_cov.rows() != static_cast<long>(m) ||
      spec.innov_cov.cols() != static_cast<long>(m))
    throw Error(errc::config_error, "grid field dimensions are inconsistent");

  for (double w : spec.weights)
    if (!(w > 0.0))
      throw Error(errc::non_positive_weight, "quadrature weights must be positive");

  for (double dv : spec.d)
    if (!(dv > 0.5))
      throw Error(errc::exponent_out_of_range,
                  "memory exponent d <= 1/2 at some site (series would diverge)");

  const Eigen::MatrixXd& C = spec.innov_cov;
  double scale = std::max(1e-300, C.cwiseAbs().maxCoeff());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (std::abs(C(i, j) - C(j, i)) > 1e-12 * scale)
        throw Error(errc::asymmetric_covariance, "innovation covariance is not symmetric");

  for (std::size_t i = 0; i < m; ++i) {
    if (C(i, i) < 0.0)
      throw Error(errc::not_psd, "negative innovation variance");
    for (std::size_t j = 0; j < m; ++j) {
      double bound = std::sqrt(C(i, i)) * std::sqrt(C(j, j));
      if (std::abs(C(i, j)) > bound + 1e-12 * scale)
        throw Error(errc::cauchy_schwarz_violation,
                    "|sigma(r,s)| exceeds sigma(r)sigma(s) at sites " +
                        std::to_string(i) + "," + std::to_string(j));
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  double min_eig = es.eigenvalues().minCoeff();
  double tr = C.trace();
  if (min_eig < -kEpsPsd * std::max(tr, 1e-300))
    throw Error(errc::not_psd, "innovation covariance has eigenvalue " +
                                   std::to_string(min_eig) + " below -eps*trace");

  return SpatialGrid(spec.points, spec.weights, spec.d, spec.innov_cov, min_eig);
}

/// Classifies the d-field into one of the three covered regimes. Fields that
/// straddle a regime boundary are rejected: no limit theorem covers them.
inline Regime classify_regime(const SpatialGrid& grid) {
  bool any_long = false, any_boundary = false, any_short = false;
  double dmin = grid.d(0), dmax = grid.d(0);
  for (int i = 0; i < grid.size(); ++i) {
    double dv = grid.d(i);
    dmin = std::min(dmin, dv);
    dmax = std::max(dmax, dv);
    if (dv < 1.0)
      any_long = true;
    else if (dv == 1.0)
      any_boundary = true;
    else
      any_short = true;
  }
  int kinds = (any_long ? 1 : 0) + (any_boundary ? 1 : 0) + (any_short ? 1 : 0);
  if (kinds > 1)
    throw Error(errc::mixed_regime,
                "d-field straddles regime boundaries (d in [" + std::to_string(dmin) +
                    ", " + std::to_string(dmax) + "])");
  if (any_long) return Regime{RegimeKind::Long, dmin, dmax};
  if (any_boundary) return Regime{RegimeKind::Boundary, dmin, dmax};
  return Regime{RegimeKind::Short, dmin, dmax};
}

/// Quadrature approximations of the integrability hypotheses.
/// The (1-d)-weighted integrals only exist when d < 1 everywhere, so they
/// are reported as optional.
struct IntegrabilityReport {
  double innov_second_moment = 0.0;          // integral of sigma^2 dmu
  double int_sigma2_over_2dm1 = 0.0;         // integral of sigma^2/(2d-1) dmu
  std::optional<double> int_sigma2_over_1md_sq;     // sigma^2/(1-d)^2
  std::optional<double> int_sigma2_over_1md_2dm1;   // sigma^2/[(1-d)(2d-1)]
  double p = 2.0;
  bool eps_pth_moment_finite = true;  // Gaussian/uniform innovations: all p
  bool division_blowup = false;
  std::vector<int> blowup_sites;
};

inline IntegrabilityReport check_integrability(const SpatialGrid& grid, double p = 2.0) {
  if (!(p >= 2.0)) throw Error(errc::domain_error, "moment order p must be >= 2");
  IntegrabilityReport rep;
  rep.p = p;
  bool all_long = true;
  for (int i = 0; i < grid.size(); ++i)
    if (grid.d(i) >= 1.0) all_long = false;

  KahanSum m2, s2dm1, s1mdsq, s1md2dm1;
  for (int i = 0; i < grid.size(); ++i) {
    double w = grid.weight(i), dv = grid.d(i), s2 = grid.sigma2(i);
    m2.add(w * s2);
    s2dm1.add(w * s2 / (2.0 * dv - 1.0));
    if (all_long) {
      s1mdsq.add(w * s2 / ((1.0 - dv) * (1.0 - dv)));
      s1md2dm1.add(w * s2 / ((1.0 - dv) * (2.0 * dv - 1.0)));
    }
    if (dv < 1.0 &&
        (std::abs(dv - 0.5) < kDeltaSing || std::abs(dv - 1.0) < kDeltaSing)) {
      rep.division_blowup = true;
      rep.blowup_sites.push_back(i);
    }
  }
  rep.innov_second_moment = m2.value();
  rep.int_sigma2_over_2dm1 = s2dm1.value();
  if (all_long) {
    rep.int_sigma2_over_1md_sq = s1mdsq.value();
    rep.int_sigma2_over_1md_2dm1 = s1md2dm1.value();
  }
  return rep;
}

}  // namespace svlm
