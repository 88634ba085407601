// Acceptance suite: every criterion runs at its stated tolerance and prints
// one PASS/FAIL line. Criteria that cannot hold at desk scale are run as
// stated and allowed to fail; their detail lines carry the measured numbers.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

#include "support/oracles.hpp"
#include "svlm/config.hpp"
#include "svlm/kernel_matrix.hpp"
#include "svlm/limit.hpp"
#include "svlm/rng.hpp"
#include "svlm/simulate.hpp"
#include "svlm/stats.hpp"
#include "svlm/theory.hpp"
#include "svlm/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace svlm;

namespace {

struct Outcome {
  int id;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  double budget = 0.0;
  std::vector<std::string> detail;
};

std::vector<Outcome> g_outcomes;

void run_criterion(int id, const std::string& name, double budget_sec,
                   const std::function<bool(Outcome&)>& fn) {
  Outcome out;
  out.id = id;
  out.name = name;
  out.budget = budget_sec;
  auto t0 = std::chrono::steady_clock::now();
  try {
    out.pass = fn(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail.push_back(std::string("exception: ") + e.what());
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (out.seconds > out.budget) {
    out.pass = false;
    out.detail.push_back("runtime budget exceeded");
  }
  std::printf("[%s] criterion %2d: %-46s (%.1fs / budget %.0fs)\n",
              out.pass ? "PASS" : "FAIL", id, name.c_str(), out.seconds, out.budget);
  for (const auto& d : out.detail) std::printf("        %s\n", d.c_str());
  std::fflush(stdout);
  g_outcomes.push_back(out);
}

ExperimentConfig load_shipped(const std::string& file) {
  return load_config_file((fs::path(SVLM_CONFIG_DIR) / file).string());
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

int run_cmd(const std::string& cmd) {
  int rc = std::system(cmd.c_str());
  return rc == -1 ? -1 : WEXITSTATUS(rc);
}

std::string report_sans_meta(const fs::path& p) {
  std::ifstream is(p);
  if (!is) return "<missing " + p.string() + ">";
  json j = json::parse(is);
  j.erase("meta");
  return j.dump();
}

// ---- criteria ------------------------------------------------------------

bool c1_beta_crosscheck(Outcome& out) {
  RandomStream rs(101);
  bool ok = true;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    double dr = 0.55 + 0.40 * rs.uniform_co();
    double ds = 0.55 + 0.40 * rs.uniform_co();
    double lg = c_const(dr, ds);
    double quad = oracle::c_const_quadrature(dr, ds);
    double rel = std::abs(lg - quad) / std::abs(lg);
    worst = std::max(worst, rel);
    if (rel > 1e-10) ok = false;
  }
  out.detail.push_back("worst relative gap log-gamma vs quadrature: " + fmt(worst));
  return ok;
}

bool c2_c_bound(Outcome& out) {
  RandomStream rs(202);
  bool ok = true;
  double worst_margin = 1e300;
  for (int k = 0; k < 200; ++k) {
    double d = 0.501 + 0.498 * rs.uniform_co();
    double margin = c_upper_bound(d) - c_const(d, d);
    worst_margin = std::min(worst_margin, margin);
    if (margin < 0.0) ok = false;
  }
  out.detail.push_back("smallest bound margin over 200 draws: " + fmt(worst_margin));
  return ok;
}

bool c3_gamma_asymptotics(Outcome& out) {
  ExperimentConfig cfg = load_shipped("reference.json");
  SpatialGrid grid = build_grid(cfg.grid_spec);
  bool ok = true;
  const long h = 100000;
  for (int i = 0; i < grid.size(); ++i)
    for (int j = 0; j < grid.size(); ++j) {
      double ratio = gamma_h(grid, i, j, h) / gamma_asymptotic(grid, i, j, h);
      if (std::abs(ratio - 1.0) > 0.02) {
        ok = false;
        out.detail.push_back("LONG pair (" + std::to_string(i) + "," + std::to_string(j) +
                             ") h=1e5: |ratio-1| = " + fmt(std::abs(ratio - 1.0)) +
                             " > 0.02 (correction decays like h^{d(r)-1})");
      }
    }
  ExperimentConfig bcfg = load_shipped("boundary.json");
  SpatialGrid bgrid = build_grid(bcfg.grid_spec);
  double bratio = gamma_h(bgrid, 0, 0, 1000000) / gamma_asymptotic(bgrid, 0, 0, 1000000);
  out.detail.push_back("BOUNDARY h=1e6: |ratio-1| = " + fmt(std::abs(bratio - 1.0)) +
                       " (tolerance 0.15)");
  if (std::abs(bratio - 1.0) > 0.15) ok = false;
  return ok;
}

bool c4_partial_sum(Outcome& out) {
  bool ok = true;
  {
    ExperimentConfig cfg = load_shipped("reference.json");
    SpatialGrid grid = build_grid(cfg.grid_spec);
    Regime reg = classify_regime(grid);
    CovCalculator calc(grid, 16386);
    for (int i = 0; i < grid.size(); ++i)
      for (int j = 0; j < grid.size(); ++j) {
        std::vector<double> gaps;
        for (long n : {1024L, 4096L, 16384L}) {
          double ss = calc.partial_sum_cov(i, j, n, n / 2);
          double pred = asymptotic_prediction(grid, i, j, n, 1.0, 0.5, reg);
          gaps.push_back(std::abs(ss / pred - 1.0));
        }
        bool mono = gaps[1] < gaps[0] && gaps[2] < gaps[1];
        bool within = gaps.back() <= 0.02;
        if (!within || !mono) {
          ok = false;
          out.detail.push_back("LONG pair (" + std::to_string(i) + "," + std::to_string(j) +
                               "): final gap " + fmt(gaps.back()) +
                               (mono ? " (gaps shrink)" : " (gaps grow)") +
                               ", tolerance 0.02");
        }
      }
  }
  {
    ExperimentConfig cfg = load_shipped("boundary.json");
    SpatialGrid grid = build_grid(cfg.grid_spec);
    Regime reg = classify_regime(grid);
    CovCalculator calc(grid, 16386);
    std::vector<double> gaps;
    for (long n : {1024L, 4096L, 16384L}) {
      double ss = calc.partial_sum_cov(0, 0, n, n);
      double pred = asymptotic_prediction(grid, 0, 0, n, 1.0, 1.0, reg);
      gaps.push_back(std::abs(ss / pred - 1.0));
    }
    bool mono = gaps[1] < gaps[0] && gaps[2] < gaps[1];
    bool within = gaps.back() <= 0.20;
    out.detail.push_back("BOUNDARY: gaps over n=2^10,2^12,2^14: " + fmt(gaps[0]) + ", " +
                         fmt(gaps[1]) + ", " + fmt(gaps[2]) +
                         (mono ? " (monotone)" : " (log-correction crossover: not monotone)"));
    if (!within || !mono) ok = false;
  }
  return ok;
}

bool c5_selfsimilarity(Outcome& out) {
  ExperimentConfig cfg = load_shipped("reference.json");
  SpatialGrid grid = build_grid(cfg.grid_spec);
  double worst = 0.0;
  for (double a : {0.5, 2.0, 2.7, 10.0})
    for (int i = 0; i < grid.size(); ++i)
      for (int j = 0; j < grid.size(); ++j)
        for (double t : {0.2, 0.4, 0.6, 0.8, 1.0})
          for (double u : {0.2, 0.4, 0.6, 0.8, 1.0}) {
            double lhs = limit_kernel_V(grid, i, a * t, j, a * u);
            double rhs =
                std::pow(a, 3.0 - d_sum(grid, i, j)) * limit_kernel_V(grid, i, t, j, u);
            if (lhs != 0.0) worst = std::max(worst, std::abs(lhs - rhs) / std::abs(lhs));
          }
  out.detail.push_back("max relative deviation: " + fmt(worst) + " (tolerance 1e-12)");
  return worst <= 1e-12;
}

bool c6_psd(Outcome& out) {
  ExperimentConfig cfg = load_shipped("reference.json");
  SpatialGrid grid = build_grid(cfg.grid_spec);
  std::vector<double> times;
  for (int k = 0; k <= 8; ++k) times.push_back(k / 8.0);
  KernelMatrix km = build_kernel_matrix(grid, times, KernelKind::VLong);
  double me = km.min_eig(), tr = km.trace();
  out.detail.push_back("min eigenvalue / trace = " + fmt(me / tr) + " (floor -1e-8)");
  return me >= -1e-8 * tr;
}

bool c7_fbm(Outcome& out) {
  GridSpec spec;
  spec.points = {0.0};
  spec.weights = {1.0};
  spec.d = {0.75};
  spec.innov_cov = Eigen::MatrixXd::Constant(1, 1, 1.0);
  SpatialGrid grid = build_grid(spec);
  const double d = 0.75;
  double norm = c_const(d, d) / ((1.0 - d) * (3.0 - 2.0 * d));
  double worst = 0.0;
  for (double t : {0.2, 0.4, 0.6, 0.8, 1.0})
    for (double u : {0.2, 0.4, 0.6, 0.8, 1.0}) {
      double lhs = limit_kernel_V(grid, 0, t, 0, u) / norm;
      double rhs = fbm_kernel(1.5 - d, t, u);
      if (rhs != 0.0) worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
  out.detail.push_back("max relative deviation vs fBm(H=0.75): " + fmt(worst));
  return worst <= 1e-12;
}

bool c8_convolution(Outcome& out) {
  double worst = 0.0;
  int cfg_index = 0;
  for (long n : {16L, 256L}) {
    for (long J : {8L, 1024L}) {
      for (int m : {1, 3}) {
        GridSpec spec;
        RandomStream rs(900 + static_cast<std::uint64_t>(cfg_index));
        for (int i = 0; i < m; ++i) {
          spec.points.push_back(static_cast<double>(i) / m);
          spec.weights.push_back(1.0 / m);
          spec.d.push_back(0.55 + rs.uniform_co());
        }
        spec.innov_cov.resize(m, m);
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j)
            spec.innov_cov(i, j) = std::exp(-std::abs(spec.points[i] - spec.points[j]));
        SpatialGrid grid = build_grid(spec);
        TruncationPlan plan{J, 0.0, 0.0};
        ProcessGenerator gen(grid, n, plan);
        RandomStream stream(derive_seed(42, StreamPurpose::innovations,
                                        static_cast<std::uint64_t>(cfg_index)));
        Eigen::MatrixXd innov =
            sample_innovations(grid, gen.innovation_count(), InnovDist::Gaussian, stream);
        Eigen::MatrixXd fast = gen.paths_fft(innov);
        Eigen::MatrixXd slow = gen.paths_direct(innov);
        double rel = (fast - slow).cwiseAbs().maxCoeff() / slow.cwiseAbs().maxCoeff();
        worst = std::max(worst, rel);
        ++cfg_index;
      }
    }
  }
  out.detail.push_back("worst max-abs relative FFT/direct gap: " + fmt(worst));
  return worst <= 1e-10;
}

bool c9_long_mc(Outcome& out) {
  bool ok = true;
  for (const char* dist : {"gaussian", "uniform"}) {
    fs::path cfg_path = fs::path(SVLM_CONFIG_DIR) / "reference.json";
    std::ifstream is(cfg_path);
    json j = json::parse(is);
    j["dist"] = dist;
    ExperimentConfig cfg = parse_config(j);
    Verifier v(cfg);
    VerificationReport rep = v.run_check("fclt");
    int failed_entries = 0;
    double ks_p = -1.0;
    for (const auto& e : rep.entries) {
      if (e.informational) continue;
      if (e.label.find("gaussianity") != std::string::npos) ks_p = e.observed;
      if (!e.pass) ++failed_entries;
    }
    out.detail.push_back(std::string(dist) + ": " + (rep.pass ? "pass" : "fail") + ", " +
                         std::to_string(failed_entries) + " entries out of tolerance, KS p=" +
                         fmt(ks_p) + ", tail bound " +
                         fmt(rep.extra["truncation_tail_bound"].get<double>()));
    if (!rep.pass) ok = false;
  }
  return ok;
}

bool c10_boundary_mc(Outcome& out) {
  ExperimentConfig cfg = load_shipped("boundary.json");
  SpatialGrid grid = build_grid(cfg.grid_spec);
  TruncationPlan plan = make_truncation_plan(cfg, grid);
  std::vector<double> times{1.0};
  int workers = resolve_workers(cfg.workers);
  PathEnsemble ens =
      simulate_ensemble(grid, cfg.n, cfg.R, cfg.dist, times, plan, cfg.seed, workers, true);
  PathEnsemble norm = normalize_ensemble(ens, grid);
  KahanSum s2;
  for (long r = 0; r < norm.reps; ++r) s2.add(norm.value(r, 0, 0) * norm.value(r, 0, 0));
  double emp = s2.value() / static_cast<double>(norm.reps);
  double dev = std::abs(emp - grid.sigma2(0)) / grid.sigma2(0);
  out.detail.push_back("empirical var of normalized path at t=1: " + fmt(emp) +
                       " vs sigma^2 = 1, deviation " + fmt(dev) + " (tolerance 0.20)");
  return dev <= 0.20;
}

bool c11_short_mc(Outcome& out) {
  ExperimentConfig cfg = load_shipped("short.json");
  Verifier v(cfg);
  VerificationReport rep = v.run_check("fclt");
  std::string winner = rep.extra["candidate_winner"];
  out.detail.push_back("candidate winner: " + winner + " (max rel dev: longrun " +
                       fmt(rep.extra["max_rel_dev_longrun"].get<double>()) + ", wiener " +
                       fmt(rep.extra["max_rel_dev_wiener"].get<double>()) + ")");
  return rep.pass && winner != "none";
}

bool c12_moment_bounds(Outcome& out) {
  ExperimentConfig cfg = load_shipped("reference.json");
  Verifier v(cfg);
  VerificationReport rep = v.run_check("moment_bounds");
  bool var_ok = true, bounded_ok = true, mono_ok = true;
  for (const auto& e : rep.entries) {
    if (e.label.rfind("var bound", 0) == 0 && !e.pass) var_ok = false;
    if (e.label.rfind("incr ratio max", 0) == 0 && !e.informational && !e.pass)
      bounded_ok = false;
    if (e.label.rfind("incr ratio nonincreasing", 0) == 0 && !e.pass) {
      mono_ok = false;
      out.detail.push_back("increment ratio drifts up by " + fmt(e.observed) +
                           " per doubling (approaches its n->inf limit from below)");
    }
  }
  out.detail.push_back(std::string("variance bound vs g(s): ") + (var_ok ? "holds" : "fails") +
                       "; bounded by 10x n=2^8 value: " + (bounded_ok ? "holds" : "fails") +
                       "; nonincreasing in n: " + (mono_ok ? "holds" : "fails"));
  return var_ok && bounded_ok && mono_ok;
}

bool c13_reproducibility(Outcome& out) {
  fs::path cfg = fs::path(SVLM_CONFIG_DIR) / "reference.json";
  fs::path w1 = fs::temp_directory_path() / "svlm_acc13_w1";
  fs::path w4 = fs::temp_directory_path() / "svlm_acc13_w4";
  fs::remove_all(w1);
  fs::remove_all(w4);
  std::string base = std::string(SVLM_CLI_PATH) + " verify all --config " + cfg.string();
  int rc1 = run_cmd(base + " --workers 1 --out " + w1.string() + " > /dev/null");
  int rc4 = run_cmd(base + " --workers 4 --out " + w4.string() + " > /dev/null");
  // some checks fail by design at desk scale, so exit 1 is in-contract
  if (rc1 < 0 || rc1 > 1 || rc4 < 0 || rc4 > 1) {
    out.detail.push_back("verify all exited abnormally: " + std::to_string(rc1) + ", " +
                         std::to_string(rc4));
    return false;
  }
  bool ok = true;
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(w1)) {
    if (entry.path().extension() != ".json") continue;
    std::string a = report_sans_meta(entry.path());
    std::string b = report_sans_meta(w4 / entry.path().filename());
    ++compared;
    if (a != b) {
      ok = false;
      out.detail.push_back("mismatch in " + entry.path().filename().string());
    }
  }
  out.detail.push_back(std::to_string(compared) +
                       " reports compared across worker counts 1 and 4; exit codes " +
                       std::to_string(rc1) + "/" + std::to_string(rc4));
  return ok && compared >= 6 && rc1 == rc4;
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  run_criterion(1, "beta constant vs quadrature oracle", 5, c1_beta_crosscheck);
  run_criterion(2, "c(s) upper bound", 1, c2_c_bound);
  run_criterion(3, "gamma asymptotic ratios", 30, c3_gamma_asymptotics);
  run_criterion(4, "partial-sum covariance convergence", 120, c4_partial_sum);
  run_criterion(5, "exact self-similarity identity", 1, c5_selfsimilarity);
  run_criterion(6, "PSD of the limit kernel Gram matrix", 1, c6_psd);
  run_criterion(7, "fBm specialization", 1, c7_fbm);
  run_criterion(8, "FFT/direct convolution equivalence", 30, c8_convolution);
  run_criterion(9, "long-regime Monte Carlo vs limit kernel", 300, c9_long_mc);
  run_criterion(10, "boundary-regime Monte Carlo variance", 300, c10_boundary_mc);
  run_criterion(11, "short-regime Monte Carlo candidates", 300, c11_short_mc);
  run_criterion(12, "moment bounds", 120, c12_moment_bounds);
  run_criterion(13, "byte-identical reports across workers", 900, c13_reproducibility);

  int failed = 0;
  for (const auto& o : g_outcomes)
    if (!o.pass) ++failed;
  std::printf("%d/%d criteria passed\n", static_cast<int>(g_outcomes.size()) - failed,
              static_cast<int>(g_outcomes.size()));
  return failed == 0 ? 0 : 1;
}
