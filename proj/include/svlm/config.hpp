#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "svlm/error.hpp"
#include "svlm/grid.hpp"
#include "svlm/io.hpp"
#include "svlm/simulate.hpp"
#include "svlm/special.hpp"
#include "svlm/theory.hpp"
#include "svlm/weights.hpp"

namespace svlm {

/// Tolerances and knobs with spec'd defaults; every one is overridable from
/// the config's "tolerances" object.
struct Tolerances {
  double gamma_asym_long = 0.02;
  double gamma_asym_boundary = 0.15;
  double partial_sum_long = 0.02;
  double partial_sum_boundary = 0.20;
  double fclt_rel_long = 0.10;
  double fclt_rel_boundary = 0.20;
  double fclt_rel_short = 0.10;
  double ks_alpha = 0.01;
  double selfsim_det = 1e-12;
  double psd_eps = 1e-8;
  double moment_incr_factor = 10.0;
};

struct ExperimentConfig {
  nlohmann::json raw;  // verbatim echo of the parsed document
  std::uint64_t seed = 0;
  GridSpec grid_spec;
  long n = 4096;
  std::vector<long> n_list = {256, 1024, 4096, 16384};
  std::vector<long> moment_n_list = {256, 512, 1024, 2048, 4096};
  long R = 4000;
  InnovDist dist = InnovDist::Gaussian;
  std::vector<double> time_grid;  // default dyadic k/16
  std::vector<double> a_list = {0.5, 2.0, 2.7, 10.0};
  std::vector<long> h_list;       // default depends on regime
  std::optional<long> trunc_J;    // explicit horizon
  double trunc_tol_rel = 1e-4;    // else: tol = tol_rel * gamma_0(s) per site
  int dyadic_depth = 4;
  long equiv_n = 4096;
  double equiv_t = 0.51;
  double equiv_u = 0.99;
  std::vector<std::string> checks;  // empty = all applicable to the regime
  std::string output_dir = "out";
  int workers = 0;  // 0 = auto
  Tolerances tol;

  /// Canonical form for hashing: execution knobs (worker count, output
  /// location) do not change the experiment's identity.
  std::string canonical_dump() const {
    nlohmann::json j = raw;
    j.erase("workers");
    j.erase("output_dir");
    return j.dump();
  }
  std::string config_hash() const { return hash_hex(fnv1a64(canonical_dump())); }
};

namespace detail {

inline void require_field(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key))
    throw Error(errc::config_error, "missing required field: " + key);
}

inline Eigen::MatrixXd innovation_matrix(const nlohmann::json& spec,
                                         const std::vector<double>& points) {
  const int m = static_cast<int>(points.size());
  Eigen::MatrixXd C(m, m);
  if (spec.contains("matrix")) {
    auto rows = spec.at("matrix");
    if (static_cast<int>(rows.size()) != m)
      throw Error(errc::config_error, "innovation matrix has wrong dimension");
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) C(i, j) = rows.at(i).at(j).get<double>();
    return C;
  }
  std::string kernel = spec.value("kernel", "identity");
  double scale = spec.value("scale", 1.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (kernel == "exp")
        C(i, j) = scale * std::exp(-std::abs(points[i] - points[j]));
      else if (kernel == "identity")
        C(i, j) = (i == j) ? scale : 0.0;
      else
        throw Error(errc::config_error, "unknown innovation kernel: " + kernel);
    }
  return C;
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.raw = j;
  detail::require_field(j, "seed");
  cfg.seed = j.at("seed").get<std::uint64_t>();
  detail::require_field(j, "grid");
  const auto& g = j.at("grid");
  detail::require_field(g, "points");
  cfg.grid_spec.points = g.at("points").get<std::vector<double>>();
  const std::size_t m = cfg.grid_spec.points.size();
  if (g.contains("weights"))
    cfg.grid_spec.weights = g.at("weights").get<std::vector<double>>();
  else
    cfg.grid_spec.weights.assign(m, 1.0 / static_cast<double>(m));
  detail::require_field(g, "d");
  if (g.at("d").is_object()) {
    const auto& ramp = g.at("d").at("ramp");
    double d0 = ramp.at("d0").get<double>();
    double d1 = ramp.at("d1").get<double>();
    cfg.grid_spec.d.resize(m);
    for (std::size_t i = 0; i < m; ++i)
      cfg.grid_spec.d[i] = d0 + (d1 - d0) * cfg.grid_spec.points[i];
  } else {
    cfg.grid_spec.d = g.at("d").get<std::vector<double>>();
  }
  detail::require_field(g, "innovation");
  cfg.grid_spec.innov_cov = detail::innovation_matrix(g.at("innovation"), cfg.grid_spec.points);

  cfg.n = j.value("n", cfg.n);
  if (j.contains("n_list")) cfg.n_list = j.at("n_list").get<std::vector<long>>();
  if (j.contains("moment_n_list"))
    cfg.moment_n_list = j.at("moment_n_list").get<std::vector<long>>();
  cfg.R = j.value("R", cfg.R);
  std::string dist = j.value("dist", "gaussian");
  if (dist == "gaussian")
    cfg.dist = InnovDist::Gaussian;
  else if (dist == "uniform")
    cfg.dist = InnovDist::Uniform;
  else
    throw Error(errc::config_error, "dist must be gaussian or uniform");
  if (j.contains("time_grid")) {
    cfg.time_grid = j.at("time_grid").get<std::vector<double>>();
  } else {
    for (int k = 0; k <= 16; ++k) cfg.time_grid.push_back(k / 16.0);
  }
  if (j.contains("a_list")) cfg.a_list = j.at("a_list").get<std::vector<double>>();
  if (j.contains("h_list")) cfg.h_list = j.at("h_list").get<std::vector<long>>();
  if (j.contains("truncation")) {
    const auto& tr = j.at("truncation");
    if (tr.contains("J")) cfg.trunc_J = tr.at("J").get<long>();
    if (tr.contains("tol_rel")) cfg.trunc_tol_rel = tr.at("tol_rel").get<double>();
  }
  cfg.dyadic_depth = j.value("dyadic_depth", cfg.dyadic_depth);
  if (j.contains("equiv")) {
    const auto& e = j.at("equiv");
    cfg.equiv_n = e.value("n", cfg.equiv_n);
    cfg.equiv_t = e.value("t", cfg.equiv_t);
    cfg.equiv_u = e.value("u", cfg.equiv_u);
  }
  if (j.contains("checks")) cfg.checks = j.at("checks").get<std::vector<std::string>>();
  cfg.output_dir = j.value("output_dir", cfg.output_dir);
  cfg.workers = j.value("workers", cfg.workers);
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    auto ov = [&](const char* key, double& field) { field = t.value(key, field); };
    ov("gamma_asym_long", cfg.tol.gamma_asym_long);
    ov("gamma_asym_boundary", cfg.tol.gamma_asym_boundary);
    ov("partial_sum_long", cfg.tol.partial_sum_long);
    ov("partial_sum_boundary", cfg.tol.partial_sum_boundary);
    ov("fclt_rel_long", cfg.tol.fclt_rel_long);
    ov("fclt_rel_boundary", cfg.tol.fclt_rel_boundary);
    ov("fclt_rel_short", cfg.tol.fclt_rel_short);
    ov("ks_alpha", cfg.tol.ks_alpha);
    ov("selfsim_det", cfg.tol.selfsim_det);
    ov("psd_eps", cfg.tol.psd_eps);
    ov("moment_incr_factor", cfg.tol.moment_incr_factor);
  }
  return cfg;
}

inline ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(errc::config_error, "cannot open config file: " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    throw Error(errc::config_error, std::string("config parse error: ") + e.what());
  }
  return parse_config(j);
}

/// Resolves the truncation horizon for a grid: an explicit J wins; otherwise
/// the per-site tolerance tol_rel * gamma_0(s) is solved sitewise and the
/// largest horizon is taken.
inline TruncationPlan make_truncation_plan(const ExperimentConfig& cfg,
                                           const SpatialGrid& grid) {
  if (cfg.trunc_J) {
    long J = *cfg.trunc_J;
    double bound = 0.0, tol = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
      bound = std::max(bound, truncation_tail_bound(grid.d(i), grid.sigma2(i), J));
      double g0 = grid.sigma2(i) * gamma_series(grid.d(i), grid.d(i), 0);
      tol = std::max(tol, cfg.trunc_tol_rel * g0);
    }
    return TruncationPlan{J, bound, std::max(tol, bound)};
  }
  long J = 1;
  double tol_max = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    double g0 = grid.sigma2(i) * gamma_series(grid.d(i), grid.d(i), 0);
    double tol = cfg.trunc_tol_rel * g0;
    tol_max = std::max(tol_max, tol);
    TruncationPlan p = truncation_horizon(grid.d(i), grid.sigma2(i), tol);
    J = std::max(J, p.horizon);
  }
  double bound = 0.0;
  for (int i = 0; i < grid.size(); ++i)
    bound = std::max(bound, truncation_tail_bound(grid.d(i), grid.sigma2(i), J));
  return TruncationPlan{J, bound, tol_max};
}

}  // namespace svlm
