#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "svlm/error.hpp"
#include "svlm/fft.hpp"
#include "svlm/grid.hpp"
#include "svlm/io.hpp"
#include "svlm/mathutil.hpp"
#include "svlm/pool.hpp"
#include "svlm/rng.hpp"
#include "svlm/weights.hpp"

namespace svlm {

enum class InnovDist { Gaussian, Uniform };

inline const char* dist_name(InnovDist d) {
  return d == InnovDist::Gaussian ? "GAUSSIAN" : "UNIFORM";
}

struct CovFactor {
  Eigen::MatrixXd L;   // lower triangular, L L^T = cov + jitter I
  double jitter_used = 0.0;
};

/// Cholesky with an escalating diagonal jitter ladder:
/// 0, 1e-12, 1e-10, 1e-8 (relative to trace). Near-singular Gram matrices
/// (clustered time points, pinned zero variance) land on the small rungs.
inline CovFactor factor_with_jitter(const Eigen::MatrixXd& cov) {
  double tr = cov.trace();
  if (tr <= 0.0) {
    // zero covariance: factor is identically zero
    return CovFactor{Eigen::MatrixXd::Zero(cov.rows(), cov.cols()), 0.0};
  }
  const double ladder[] = {0.0, 1e-12, 1e-10, 1e-8};
  for (double rel : ladder) {
    Eigen::MatrixXd jittered = cov;
    double jit = rel * tr;
    if (jit > 0.0) jittered.diagonal().array() += jit;
    Eigen::LLT<Eigen::MatrixXd> llt(jittered);
    if (llt.info() == Eigen::Success) {
      Eigen::MatrixXd L = llt.matrixL();
      // Guard against a "successful" factorization that fails to reproduce
      // the input (can happen on the zero rung for semidefinite input).
      double err = (L * L.transpose() - jittered).cwiseAbs().maxCoeff();
      if (err <= 1e-10 * tr) return CovFactor{std::move(L), jit};
    }
  }
  throw Error(errc::factorization_failure,
              "covariance not factorizable within the jitter cap 1e-8*trace");
}

/// count i.i.d. innovation rows with covariance sigma(r,s). GAUSSIAN applies
/// the covariance factor to standard normals; UNIFORM applies the same
/// factor to centered uniforms scaled to unit variance, so second moments
/// match and all higher moments are finite.
inline Eigen::MatrixXd sample_innovations(const SpatialGrid& grid, long count,
                                          InnovDist dist, RandomStream& stream,
                                          const CovFactor& factor) {
  const int m = grid.size();
  Eigen::MatrixXd out(count, m);
  Eigen::VectorXd z(m);
  for (long r = 0; r < count; ++r) {
    for (int i = 0; i < m; ++i)
      z(i) = dist == InnovDist::Gaussian ? stream.gaussian() : stream.unit_uniform_centered();
    out.row(r) = (factor.L * z).transpose();
  }
  return out;
}

inline Eigen::MatrixXd sample_innovations(const SpatialGrid& grid, long count,
                                          InnovDist dist, RandomStream& stream) {
  CovFactor f = factor_with_jitter(grid.innov_cov());
  return sample_innovations(grid, count, dist, stream, f);
}

/// Shared machinery for turning innovation blocks into process paths.
/// Innovation row q holds eps at time q-J+1, so rows 0..J-1 are the
/// pre-sample past and X_k = sum_{j=0}^{J} v_j eps_{k-j} needs rows up to
/// k+J-1.
class ProcessGenerator {
 public:
  ProcessGenerator(const SpatialGrid& grid, long n, TruncationPlan plan)
      : grid_(grid), n_(n), plan_(plan) {
    const long J = plan_.horizon;
    fft_size_ = next_pow2(static_cast<std::uint64_t>(n + 2 * J + 1));
    coeff_fft_.resize(static_cast<std::size_t>(grid.size()));
    Eigen::FFT<double> fft;
    for (int i = 0; i < grid.size(); ++i) {
      std::vector<double> v(fft_size_, 0.0);
      for (long j = 0; j <= J; ++j)
        v[static_cast<std::size_t>(j)] = coeff(j, grid.d(i));
      fft.fwd(coeff_fft_[static_cast<std::size_t>(i)], v);
    }
  }

  long innovation_count() const { return n_ + plan_.horizon; }

  /// Fast path: per-site cyclic convolution, zero-padded past wraparound.
  Eigen::MatrixXd paths_fft(const Eigen::MatrixXd& innov) const {
    const long J = plan_.horizon;
    Eigen::MatrixXd X(n_, grid_.size());
    Eigen::FFT<double> fft;
    std::vector<double> padded(fft_size_);
    std::vector<std::complex<double>> freq;
    for (int i = 0; i < grid_.size(); ++i) {
      std::fill(padded.begin(), padded.end(), 0.0);
      for (long q = 0; q < innov.rows(); ++q)
        padded[static_cast<std::size_t>(q)] = innov(q, i);
      fft.fwd(freq, padded);
      const auto& cf = coeff_fft_[static_cast<std::size_t>(i)];
      for (std::size_t p = 0; p < freq.size(); ++p) freq[p] *= cf[p];
      std::vector<double> conv;
      fft.inv(conv, freq);
      for (long k = 1; k <= n_; ++k)
        X(k - 1, i) = conv[static_cast<std::size_t>(k - 1 + J)];
    }
    return X;
  }

  /// Reference path: direct O(nJ) summation.
  Eigen::MatrixXd paths_direct(const Eigen::MatrixXd& innov) const {
    const long J = plan_.horizon;
    Eigen::MatrixXd X(n_, grid_.size());
    for (int i = 0; i < grid_.size(); ++i) {
      double di = grid_.d(i);
      std::vector<double> v(static_cast<std::size_t>(J) + 1);
      for (long j = 0; j <= J; ++j) v[static_cast<std::size_t>(j)] = coeff(j, di);
      for (long k = 1; k <= n_; ++k) {
        KahanSum acc;
        for (long j = 0; j <= J; ++j) acc.add(v[static_cast<std::size_t>(j)] * innov(k - j + J - 1, i));
        X(k - 1, i) = acc.value();
      }
    }
    return X;
  }

 private:
  const SpatialGrid& grid_;
  long n_;
  TruncationPlan plan_;
  std::uint64_t fft_size_;
  std::vector<std::vector<std::complex<double>>> coeff_fft_;
};

/// One linear-process realization X_1..X_n (rows) at every site (columns).
inline Eigen::MatrixXd generate_linear_process(const SpatialGrid& grid, long n,
                                               const TruncationPlan& plan, InnovDist dist,
                                               RandomStream& stream, bool use_fft = true) {
  ProcessGenerator gen(grid, n, plan);
  CovFactor f = factor_with_jitter(grid.innov_cov());
  Eigen::MatrixXd innov = sample_innovations(grid, gen.innovation_count(), dist, stream, f);
  return use_fft ? gen.paths_fft(innov) : gen.paths_direct(innov);
}

/// zeta_n(t) = S_floor(nt) + {nt} X_{floor(nt)+1}, rows = times, cols = sites.
inline Eigen::MatrixXd polygonal_paths(const Eigen::MatrixXd& X, long n,
                                       const std::vector<double>& times) {
  if (X.rows() < n) throw Error(errc::domain_error, "process shorter than n");
  const int m = static_cast<int>(X.cols());
  // prefix sums S_0..S_n
  Eigen::MatrixXd S(n + 1, m);
  S.row(0).setZero();
  for (long k = 1; k <= n; ++k) S.row(k) = S.row(k - 1) + X.row(k - 1);
  Eigen::MatrixXd out(static_cast<long>(times.size()), m);
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    double t = times[ti];
    if (t < 0.0 || t > 1.0)
      throw Error(errc::time_out_of_range, "polygonal time must lie in [0,1]");
    TimeSplit ts = time_split(n, t);
    out.row(static_cast<long>(ti)) = S.row(ts.k);
    if (ts.frac != 0.0) out.row(static_cast<long>(ti)) += ts.frac * X.row(ts.k);
  }
  return out;
}

inline double polygonal_path_at(const Eigen::MatrixXd& X, long n, double t, int site) {
  std::vector<double> tv{t};
  return polygonal_paths(X, n, tv)(0, site);
}

/// Simulated polygonal paths, replication-major:
/// value(rep, site, time_index).
struct PathEnsemble {
  long reps = 0;
  int sites = 0;
  std::vector<double> times;
  long n = 0;
  TruncationPlan plan;
  Regime regime{RegimeKind::Long, 0, 0};
  std::uint64_t seed = 0;
  InnovDist dist = InnovDist::Gaussian;
  bool normalized = false;
  std::vector<double> values;  // reps * sites * times

  double value(long r, int i, std::size_t ti) const {
    return values[(static_cast<std::size_t>(r) * static_cast<std::size_t>(sites) +
                   static_cast<std::size_t>(i)) *
                      times.size() +
                  ti];
  }
  double& value(long r, int i, std::size_t ti) {
    return values[(static_cast<std::size_t>(r) * static_cast<std::size_t>(sites) +
                   static_cast<std::size_t>(i)) *
                      times.size() +
                  ti];
  }

  void to_csv(std::ostream& os) const {
    os << "rep,site,t,value\n";
    for (long r = 0; r < reps; ++r)
      for (int i = 0; i < sites; ++i)
        for (std::size_t ti = 0; ti < times.size(); ++ti)
          os << r << "," << i << "," << fmt_double(times[ti]) << ","
             << fmt_double(value(r, i, ti)) << "\n";
  }

  /// Compact JSON summary: first and second moments only.
  nlohmann::json summary_json() const {
    nlohmann::json j;
    j["reps"] = reps;
    j["sites"] = sites;
    j["times"] = times;
    j["n"] = n;
    j["seed"] = seed;
    j["dist"] = dist_name(dist);
    j["normalized"] = normalized;
    j["regime"] = regime_name(regime.kind);
    j["truncation"] = {{"horizon", plan.horizon},
                       {"abs_tail_bound", plan.abs_tail_bound},
                       {"tol", plan.tol}};
    auto means = nlohmann::json::array();
    auto vars = nlohmann::json::array();
    for (int i = 0; i < sites; ++i) {
      auto mrow = nlohmann::json::array();
      auto vrow = nlohmann::json::array();
      for (std::size_t ti = 0; ti < times.size(); ++ti) {
        KahanSum s1, s2;
        for (long r = 0; r < reps; ++r) {
          double v = value(r, i, ti);
          s1.add(v);
          s2.add(v * v);
        }
        double mean = s1.value() / static_cast<double>(reps);
        mrow.push_back(mean);
        vrow.push_back(s2.value() / static_cast<double>(reps) - mean * mean);
      }
      means.push_back(mrow);
      vars.push_back(vrow);
    }
    j["mean"] = means;
    j["variance"] = vars;
    return j;
  }
};

/// Generates R independent replications in parallel. Replication r draws
/// from substream (seed, innovations, r), so the ensemble is bit-identical
/// for any worker count.
inline PathEnsemble simulate_ensemble(const SpatialGrid& grid, long n, long R,
                                      InnovDist dist, const std::vector<double>& times,
                                      const TruncationPlan& plan, std::uint64_t seed,
                                      int workers = 1, bool use_fft = true) {
  PathEnsemble ens;
  ens.reps = R;
  ens.sites = grid.size();
  ens.times = times;
  ens.n = n;
  ens.plan = plan;
  ens.regime = classify_regime(grid);
  ens.seed = seed;
  ens.dist = dist;
  ens.values.assign(static_cast<std::size_t>(R) * static_cast<std::size_t>(grid.size()) *
                        times.size(),
                    0.0);
  if (ens.regime.kind == RegimeKind::Boundary && n < 2)
    throw Error(errc::degenerate_normalizer, "boundary regime needs n >= 2");

  ProcessGenerator gen(grid, n, plan);
  CovFactor factor = factor_with_jitter(grid.innov_cov());
  parallel_for(static_cast<std::size_t>(R), workers, [&](std::size_t r) {
    RandomStream stream(derive_seed(seed, StreamPurpose::innovations, r));
    Eigen::MatrixXd innov =
        sample_innovations(grid, gen.innovation_count(), dist, stream, factor);
    Eigen::MatrixXd X = use_fft ? gen.paths_fft(innov) : gen.paths_direct(innov);
    Eigen::MatrixXd paths = polygonal_paths(X, n, times);
    for (int i = 0; i < grid.size(); ++i)
      for (std::size_t ti = 0; ti < times.size(); ++ti)
        ens.value(static_cast<long>(r), i, ti) = paths(static_cast<long>(ti), i);
  });
  for (double v : ens.values)
    if (!std::isfinite(v)) throw Error(errc::domain_error, "non-finite path value");
  return ens;
}

/// Applies the regime normalizer sitewise: n^{3/2-d(s)} in the long regime
/// (the multiplication-operator action of n^{-H}), sqrt(n) log n at the
/// boundary, sqrt(n) in the short regime.
inline PathEnsemble normalize_ensemble(const PathEnsemble& ens, const SpatialGrid& grid) {
  if (ens.normalized) throw Error(errc::already_normalized, "ensemble already normalized");
  PathEnsemble out = ens;
  out.normalized = true;
  for (int i = 0; i < grid.size(); ++i) {
    double z = normalizer_z(ens.n, grid.d(i));
    for (long r = 0; r < ens.reps; ++r)
      for (std::size_t ti = 0; ti < ens.times.size(); ++ti)
        out.value(r, i, ti) = ens.value(r, i, ti) / z;
  }
  return out;
}

}  // namespace svlm
