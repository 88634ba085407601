#pragma once

#include <cmath>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "svlm/error.hpp"
#include "svlm/grid.hpp"
#include "svlm/theory.hpp"
#include "svlm/weights.hpp"

#include <json.hpp>

namespace svlm {

enum class KernelKind { VLong, Wiener, Fbm, ExactN };

inline const char* kernel_kind_name(KernelKind k) {
  switch (k) {
    case KernelKind::VLong: return "V_LONG";
    case KernelKind::Wiener: return "WIENER";
    case KernelKind::Fbm: return "FBM";
    case KernelKind::ExactN: return "EXACT_N";
  }
  return "?";
}

/// Gram matrix of a covariance kernel on a (site x time) product grid.
/// Index order is site-major: p = site * times.size() + time_index.
struct KernelMatrix {
  std::vector<std::pair<int, double>> index;  // (site, time)
  Eigen::MatrixXd values;
  KernelKind kind = KernelKind::VLong;
  long n_param = 0;  // n for EXACT_N

  int dim() const { return static_cast<int>(index.size()); }

  double min_eig() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(values);
    return es.eigenvalues().minCoeff();
  }
  double trace() const { return values.trace(); }
  bool psd_ok(double eps = 1e-8) const {
    return min_eig() >= -eps * std::max(trace(), 1e-300);
  }

  void to_csv(std::ostream& os) const;
  nlohmann::json to_json() const;
};

/// Assembles the Gram matrix of the requested kernel. For ExactN the entries
/// are the exact normalized covariances E[zeta_n zeta_n] / (z_n z_n) of the
/// finite-n polygonal process, computed from `calc` (which may be
/// truncation-consistent).
inline KernelMatrix build_kernel_matrix(const SpatialGrid& grid,
                                        const std::vector<double>& times, KernelKind kind,
                                        long n = 0, const CovCalculator* calc = nullptr) {
  KernelMatrix km;
  km.kind = kind;
  km.n_param = n;
  for (int i = 0; i < grid.size(); ++i)
    for (double t : times) km.index.emplace_back(i, t);
  int P = km.dim();
  km.values.resize(P, P);
  for (int p = 0; p < P; ++p) {
    for (int q = p; q < P; ++q) {
      auto [i, t] = km.index[static_cast<std::size_t>(p)];
      auto [j, u] = km.index[static_cast<std::size_t>(q)];
      double v = 0.0;
      switch (kind) {
        case KernelKind::VLong:
          v = limit_kernel_V(grid, i, t, j, u);
          break;
        case KernelKind::Wiener:
          v = wiener_kernel(grid, i, t, j, u);
          break;
        case KernelKind::Fbm: {
          if (i != j) throw Error(errc::domain_error, "fBm kernel is single-site");
          v = fbm_kernel(1.5 - grid.d(i), t, u);
          break;
        }
        case KernelKind::ExactN: {
          if (!calc) throw Error(errc::domain_error, "ExactN kernel needs a CovCalculator");
          double zi = normalizer_z(n, grid.d(i));
          double zj = normalizer_z(n, grid.d(j));
          v = calc->polygonal_cov(i, j, n, t, u) / (zi * zj);
          break;
        }
      }
      km.values(p, q) = v;
      km.values(q, p) = v;
    }
  }
  return km;
}

inline void KernelMatrix::to_csv(std::ostream& os) const {
  os << "label";
  for (const auto& [site, t] : index) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), ",s%d@t%.17g", site, t);
    os << buf;
  }
  os << "\n";
  for (int p = 0; p < dim(); ++p) {
    char lab[64];
    std::snprintf(lab, sizeof(lab), "s%d@t%.17g", index[static_cast<std::size_t>(p)].first,
                  index[static_cast<std::size_t>(p)].second);
    os << lab;
    for (int q = 0; q < dim(); ++q) {
      char buf[48];
      std::snprintf(buf, sizeof(buf), ",%.17g", values(p, q));
      os << buf;
    }
    os << "\n";
  }
}

inline nlohmann::json KernelMatrix::to_json() const {
  nlohmann::json j;
  j["kernel_kind"] = kernel_kind_name(kind);
  if (kind == KernelKind::ExactN) j["n"] = n_param;
  auto idx = nlohmann::json::array();
  for (const auto& [site, t] : index) idx.push_back({{"site", site}, {"time", t}});
  j["index"] = idx;
  auto rows = nlohmann::json::array();
  for (int p = 0; p < dim(); ++p) {
    auto row = nlohmann::json::array();
    for (int q = 0; q < dim(); ++q) row.push_back(values(p, q));
    rows.push_back(row);
  }
  j["values"] = rows;
  return j;
}

}  // namespace svlm
