#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "svlm/simulate.hpp"
#include "svlm/theory.hpp"

using namespace svlm;

namespace {

SpatialGrid reference_grid() {
  GridSpec spec;
  spec.points = {0.0, 0.5, 1.0};
  spec.weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  spec.d = {0.6, 0.75, 0.9};
  spec.innov_cov.resize(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      spec.innov_cov(i, j) = std::exp(-std::abs(spec.points[i] - spec.points[j]));
  return build_grid(spec);
}

SpatialGrid single_site(double d, double s2 = 1.0) {
  GridSpec spec;
  spec.points = {0.0};
  spec.weights = {1.0};
  spec.d = {d};
  spec.innov_cov = Eigen::MatrixXd::Constant(1, 1, s2);
  return build_grid(spec);
}

SpatialGrid random_grid(int m, std::uint64_t seed) {
  RandomStream rs(seed);
  GridSpec spec;
  for (int i = 0; i < m; ++i) {
    spec.points.push_back(static_cast<double>(i) / m);
    spec.weights.push_back(1.0 / m);
    spec.d.push_back(0.55 + 1.0 * rs.uniform_co());
  }
  spec.innov_cov.resize(m, m);
  double scale = 0.5 + rs.uniform_co();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      spec.innov_cov(i, j) = scale * std::exp(-std::abs(spec.points[i] - spec.points[j]));
  return build_grid(spec);
}

}  // namespace

TEST(FactorWithJitter, ZeroMatrix) {
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 3);
  CovFactor f = factor_with_jitter(zero);
  EXPECT_EQ(f.L.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(f.jitter_used, 0.0);
}

TEST(FactorWithJitter, Reconstruction) {
  SpatialGrid g = reference_grid();
  CovFactor f = factor_with_jitter(g.innov_cov());
  double err = (f.L * f.L.transpose() - g.innov_cov()).cwiseAbs().maxCoeff();
  EXPECT_LE(err, f.jitter_used + 1e-10 * g.innov_cov().trace());
}

TEST(SampleInnovations, GaussianMoments) {
  SpatialGrid g = single_site(0.75);
  RandomStream stream(42);
  const long count = 100000;
  Eigen::MatrixXd e = sample_innovations(g, count, InnovDist::Gaussian, stream);
  double mean = e.col(0).mean();
  double var = e.col(0).squaredNorm() / count - mean * mean;
  EXPECT_LE(std::abs(mean), 4.0 / std::sqrt(static_cast<double>(count)));
  EXPECT_NEAR(var, 1.0, 0.05);
}

TEST(SampleInnovations, UniformCrossCovariance) {
  GridSpec spec;
  spec.points = {0.0, 1.0};
  spec.weights = {0.5, 0.5};
  spec.d = {0.75, 0.75};
  spec.innov_cov.resize(2, 2);
  spec.innov_cov << 1.0, 0.5, 0.5, 1.0;
  SpatialGrid g = build_grid(spec);
  RandomStream stream(99);
  const long count = 40000;
  Eigen::MatrixXd e = sample_innovations(g, count, InnovDist::Uniform, stream);
  double cross = (e.col(0).dot(e.col(1))) / count;
  EXPECT_NEAR(cross, 0.5, 4.0 * std::sqrt(1.25 / count));
}

TEST(SampleInnovations, ZeroCovarianceGivesZeros) {
  GridSpec spec;
  spec.points = {0.0};
  spec.weights = {1.0};
  spec.d = {0.75};
  spec.innov_cov = Eigen::MatrixXd::Zero(1, 1);
  SpatialGrid g = build_grid(spec);
  RandomStream stream(1);
  Eigen::MatrixXd e = sample_innovations(g, 100, InnovDist::Gaussian, stream);
  EXPECT_EQ(e.cwiseAbs().maxCoeff(), 0.0);
}

TEST(ProcessGenerator, ZeroInnovationsGiveZeroPaths) {
  SpatialGrid g = reference_grid();
  TruncationPlan plan{16, 0.0, 0.0};
  ProcessGenerator gen(g, 32, plan);
  Eigen::MatrixXd innov = Eigen::MatrixXd::Zero(gen.innovation_count(), 3);
  EXPECT_EQ(gen.paths_fft(innov).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(gen.paths_direct(innov).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ProcessGenerator, ZeroHorizonIsIdentity) {
  SpatialGrid g = single_site(0.75);
  TruncationPlan plan{0, 0.0, 0.0};
  ProcessGenerator gen(g, 16, plan);
  RandomStream stream(5);
  Eigen::MatrixXd innov(gen.innovation_count(), 1);
  for (long q = 0; q < innov.rows(); ++q) innov(q, 0) = stream.gaussian();
  Eigen::MatrixXd X = gen.paths_fft(innov);
  for (long k = 0; k < 16; ++k) EXPECT_NEAR(X(k, 0), innov(k, 0), 1e-12);
}

TEST(ProcessGenerator, FftMatchesDirectOnPropertyMatrix) {
  int cfg_index = 0;
  for (long n : {16L, 256L}) {
    for (long J : {8L, 1024L}) {
      for (int m : {1, 3}) {
        SpatialGrid g = random_grid(m, 1000 + static_cast<std::uint64_t>(cfg_index));
        TruncationPlan plan{J, 0.0, 0.0};
        ProcessGenerator gen(g, n, plan);
        RandomStream stream(derive_seed(7, StreamPurpose::innovations,
                                        static_cast<std::uint64_t>(cfg_index)));
        Eigen::MatrixXd innov =
            sample_innovations(g, gen.innovation_count(), InnovDist::Gaussian, stream);
        Eigen::MatrixXd fast = gen.paths_fft(innov);
        Eigen::MatrixXd slow = gen.paths_direct(innov);
        double scale = slow.cwiseAbs().maxCoeff();
        double err = (fast - slow).cwiseAbs().maxCoeff();
        EXPECT_LE(err, 1e-10 * scale) << "n=" << n << " J=" << J << " m=" << m;
        ++cfg_index;
      }
    }
  }
}

TEST(PolygonalPaths, Definition) {
  Eigen::MatrixXd X(4, 1);
  X << 1, 2, 3, 4;
  EXPECT_DOUBLE_EQ(polygonal_path_at(X, 4, 0.0, 0), 0.0);
  EXPECT_DOUBLE_EQ(polygonal_path_at(X, 4, 1.0, 0), 10.0);  // X1+..+X4
  EXPECT_DOUBLE_EQ(polygonal_path_at(X, 4, 0.625, 0), 1 + 2 + 0.5 * 3);
  EXPECT_THROW(polygonal_path_at(X, 4, 1.5, 0), Error);
  EXPECT_THROW(polygonal_path_at(X, 4, -0.1, 0), Error);
}

TEST(Ensemble, DeterministicAcrossWorkerCounts) {
  SpatialGrid g = reference_grid();
  TruncationPlan plan{256, 0.0, 0.0};
  std::vector<double> times{0.0, 0.25, 0.5, 0.75, 1.0};
  PathEnsemble a = simulate_ensemble(g, 64, 40, InnovDist::Gaussian, times, plan, 2024, 1);
  PathEnsemble b = simulate_ensemble(g, 64, 40, InnovDist::Gaussian, times, plan, 2024, 3);
  ASSERT_EQ(a.values.size(), b.values.size());
  for (std::size_t k = 0; k < a.values.size(); ++k) EXPECT_EQ(a.values[k], b.values[k]);
  PathEnsemble c = simulate_ensemble(g, 64, 40, InnovDist::Gaussian, times, plan, 2025, 1);
  bool identical = true;
  for (std::size_t k = 0; k < a.values.size(); ++k)
    if (a.values[k] != c.values[k]) identical = false;
  EXPECT_FALSE(identical);  // different seed, different draws
}

TEST(Ensemble, StartsAtZeroAndInterpolates) {
  SpatialGrid g = single_site(0.75);
  TruncationPlan plan{64, 0.0, 0.0};
  const long n = 8;
  std::vector<double> times{0.0, 3.0 / 8.0, 3.5 / 8.0, 4.0 / 8.0};
  PathEnsemble ens = simulate_ensemble(g, n, 20, InnovDist::Gaussian, times, plan, 7, 2);
  for (long r = 0; r < ens.reps; ++r) {
    EXPECT_EQ(ens.value(r, 0, 0), 0.0);
    double mid = ens.value(r, 0, 2);
    double avg = 0.5 * (ens.value(r, 0, 1) + ens.value(r, 0, 3));
    EXPECT_NEAR(mid, avg, 1e-12 * std::max(1.0, std::abs(avg)));
  }
}

TEST(Ensemble, SecondMomentMatchesTruncationConsistentOracle) {
  SpatialGrid g = reference_grid();
  const long n = 1024, R = 2000, J = 4096;
  TruncationPlan plan{J, 0.0, 0.0};
  std::vector<double> times{1.0};
  PathEnsemble ens = simulate_ensemble(g, n, R, InnovDist::Gaussian, times, plan, 321, 2);
  CovCalculator calc(g, n + 2, J);
  for (int i = 0; i < 3; ++i) {
    KahanSum s2;
    for (long r = 0; r < R; ++r) s2.add(ens.value(r, i, 0) * ens.value(r, i, 0));
    double emp = s2.value() / R;
    double ref = calc.polygonal_cov(i, i, n, 1.0, 1.0);
    double se = std::sqrt(2.0 / R) * ref;
    EXPECT_NEAR(emp, ref, 3.0 * se) << "site " << i;
  }
}

TEST(Ensemble, LagCovarianceMatchesTruncatedGamma) {
  SpatialGrid g = single_site(0.75);
  const long n = 16, J = 1024, R = 4000;
  TruncationPlan plan{J, 0.0, 0.0};
  ProcessGenerator gen(g, n, plan);
  CovFactor f = factor_with_jitter(g.innov_cov());
  std::vector<long> lags{0, 1, 10};
  std::vector<KahanSum> acc(lags.size());
  for (long r = 0; r < R; ++r) {
    RandomStream stream(
        derive_seed(555, StreamPurpose::innovations, static_cast<std::uint64_t>(r)));
    Eigen::MatrixXd innov =
        sample_innovations(g, gen.innovation_count(), InnovDist::Gaussian, stream, f);
    Eigen::MatrixXd X = gen.paths_fft(innov);
    for (std::size_t li = 0; li < lags.size(); ++li)
      acc[li].add(X(0, 0) * X(lags[li], 0));
  }
  for (std::size_t li = 0; li < lags.size(); ++li) {
    double emp = acc[li].value() / R;
    double ref = gamma_series_truncated(0.75, 0.75, lags[li], J);
    double g0 = gamma_series_truncated(0.75, 0.75, 0, J);
    double se = std::sqrt((g0 * g0 + ref * ref) / R);
    EXPECT_NEAR(emp, ref, 4.0 * se) << "lag " << lags[li];
  }
}

TEST(Normalize, SitewiseFactors) {
  GridSpec spec;
  spec.points = {0.0, 1.0};
  spec.weights = {0.5, 0.5};
  spec.d = {0.6, 0.9};
  spec.innov_cov = Eigen::MatrixXd::Identity(2, 2);
  SpatialGrid g = build_grid(spec);
  TruncationPlan plan{32, 0.0, 0.0};
  std::vector<double> times{1.0};
  PathEnsemble ens = simulate_ensemble(g, 100, 10, InnovDist::Gaussian, times, plan, 9, 1);
  PathEnsemble norm = normalize_ensemble(ens, g);
  for (long r = 0; r < 10; ++r) {
    EXPECT_NEAR(norm.value(r, 0, 0) * std::pow(100.0, 0.9), ens.value(r, 0, 0), 1e-9);
    EXPECT_NEAR(norm.value(r, 1, 0) * std::pow(100.0, 0.6), ens.value(r, 1, 0), 1e-9);
    if (ens.value(r, 0, 0) != 0.0 && ens.value(r, 1, 0) != 0.0) {
      double f0 = ens.value(r, 0, 0) / norm.value(r, 0, 0);
      double f1 = ens.value(r, 1, 0) / norm.value(r, 1, 0);
      EXPECT_NEAR(f0 / f1, std::pow(100.0, 0.3), 1e-9);
    }
  }
  EXPECT_THROW(normalize_ensemble(norm, g), Error);
}

TEST(Ensemble, CsvShape) {
  SpatialGrid g = single_site(0.75);
  TruncationPlan plan{8, 0.0, 0.0};
  std::vector<double> times{0.0, 0.5, 1.0};
  PathEnsemble ens = simulate_ensemble(g, 8, 3, InnovDist::Uniform, times, plan, 11, 1);
  std::ostringstream os;
  ens.to_csv(os);
  std::string csv = os.str();
  long lines = std::count(csv.begin(), csv.end(), '\n');
  EXPECT_EQ(lines, 1 + 3 * 1 * 3);  // header + reps*sites*times
  EXPECT_EQ(csv.rfind("rep,site,t,value\n", 0), 0u);
  auto sj = ens.summary_json();
  EXPECT_EQ(sj["reps"], 3);
  EXPECT_EQ(sj["dist"], "UNIFORM");
}
