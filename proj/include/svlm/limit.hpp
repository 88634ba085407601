#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "svlm/error.hpp"
#include "svlm/grid.hpp"
#include "svlm/kernel_matrix.hpp"
#include "svlm/pool.hpp"
#include "svlm/rng.hpp"
#include "svlm/simulate.hpp"

namespace svlm {

/// Finite-grid sampler for the limit Gaussian processes. Coordinates whose
/// kernel variance is exactly zero (t = 0) are pinned to zero rather than
/// pushed through a singular factorization.
struct GaussianSampler {
  KernelMatrix gram;
  Eigen::MatrixXd factor;        // dim x reduced_dim; embeds the reduced Cholesky
  double jitter_used = 0.0;
  std::vector<int> active;       // indices with nonzero variance

  int dim() const { return gram.dim(); }
};

inline GaussianSampler build_sampler(KernelKind kind, const SpatialGrid& grid,
                                     const std::vector<double>& times, long n = 0,
                                     const CovCalculator* calc = nullptr) {
  if (kind == KernelKind::VLong) {
    Regime reg = classify_regime(grid);
    if (reg.kind != RegimeKind::Long)
      throw Error(errc::domain_error, "V kernel requires the long-memory regime");
  }
  GaussianSampler s;
  s.gram = build_kernel_matrix(grid, times, kind, n, calc);
  const int P = s.gram.dim();
  for (int p = 0; p < P; ++p)
    if (s.gram.values(p, p) != 0.0) s.active.push_back(p);

  const int Q = static_cast<int>(s.active.size());
  Eigen::MatrixXd reduced(Q, Q);
  for (int a = 0; a < Q; ++a)
    for (int b = 0; b < Q; ++b) reduced(a, b) = s.gram.values(s.active[a], s.active[b]);

  CovFactor cf = factor_with_jitter(reduced);
  s.jitter_used = cf.jitter_used;
  s.factor = Eigen::MatrixXd::Zero(P, Q);
  for (int a = 0; a < Q; ++a) s.factor.row(s.active[a]) = cf.L.row(a);
  return s;
}

/// R i.i.d. zero-mean Gaussian vectors with covariance gram (up to jitter);
/// one row per replication. Replication r draws from substream
/// (seed, limit_draws, r), independent of the worker count.
inline Eigen::MatrixXd sample_limit(const GaussianSampler& sampler, long R,
                                    std::uint64_t seed, int workers = 1) {
  const int P = sampler.dim();
  const int Q = static_cast<int>(sampler.active.size());
  Eigen::MatrixXd draws(R, P);
  parallel_for(static_cast<std::size_t>(R), workers, [&](std::size_t r) {
    RandomStream stream(derive_seed(seed, StreamPurpose::limit_draws, r));
    Eigen::VectorXd z(Q);
    for (int q = 0; q < Q; ++q) z(q) = stream.gaussian();
    draws.row(static_cast<long>(r)) = (sampler.factor * z).transpose();
  });
  return draws;
}

/// The scaling family a^H: coordinate at site s is multiplied by
/// a^{3/2-d(s)}. Defined in the long-memory regime.
inline Eigen::MatrixXd apply_scaling(const Eigen::MatrixXd& draws, const SpatialGrid& grid,
                                     const KernelMatrix& gram, double a) {
  if (!(a > 0.0)) throw Error(errc::domain_error, "scaling requires a > 0");
  Regime reg = classify_regime(grid);
  if (reg.kind != RegimeKind::Long)
    throw Error(errc::domain_error, "the scaling family is defined in the long regime");
  Eigen::MatrixXd out = draws;
  for (int p = 0; p < gram.dim(); ++p) {
    int site = gram.index[static_cast<std::size_t>(p)].first;
    out.col(p) *= std::pow(a, 1.5 - grid.d(site));
  }
  return out;
}

}  // namespace svlm
