#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "rml/csv.hpp"
#include "rml/errors.hpp"
#include "rml/kernels.hpp"
#include "rml/models.hpp"
#include "rml/processes.hpp"
#include "rml/ratio.hpp"

namespace rml {

using ModelSpec = RegressionModel;

// Tensor grid over the box B (the same interval on every axis).
struct EvalGrid {
  int dim = 1;
  double mesh = 0.0;
  std::vector<double> points;  // row-major, size() * dim entries

  [[nodiscard]] std::size_t size() const { return points.size() / static_cast<std::size_t>(dim); }
  [[nodiscard]] std::span<const double> point(std::size_t k) const {
    return std::span<const double>(points).subspan(k * static_cast<std::size_t>(dim),
                                                   static_cast<std::size_t>(dim));
  }
};

// Mesh h / sqrt(n h^d), matching the partition used for the uniform bound.
inline double grid_mesh(double h, std::size_t n, int d) {
  return h / std::sqrt(static_cast<double>(n) * std::pow(h, d));
}

inline EvalGrid make_grid(const Box& box, int d, double mesh) {
  if (!(mesh > 0.0)) throw invalid_params("grid mesh must be positive");
  if (d < 1) throw invalid_params("grid dimension must be >= 1");
  const double width = box.hi - box.lo;
  const auto intervals = static_cast<std::size_t>(std::ceil(width / mesh - 1e-12));
  const std::size_t per_axis = std::max<std::size_t>(intervals, 1) + 1;
  std::vector<double> axis(per_axis);
  for (std::size_t k = 0; k < per_axis; ++k) {
    axis[k] = k + 1 == per_axis ? box.hi
                                : box.lo + width * static_cast<double>(k) /
                                               static_cast<double>(per_axis - 1);
  }
  EvalGrid g;
  g.dim = d;
  g.mesh = width / static_cast<double>(per_axis - 1);
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  while (true) {
    for (int j = 0; j < d; ++j) g.points.push_back(axis[idx[static_cast<std::size_t>(j)]]);
    std::size_t j = 0;
    while (j < idx.size() && ++idx[j] == per_axis) {
      idx[j] = 0;
      ++j;
    }
    if (j == idx.size()) break;
  }
  return g;
}

struct NwPoint {
  std::optional<double> r_hat;  // empty when f_hat(x) = 0
  double f_hat = 0.0;
  double g_hat = 0.0;
};

/// Nadaraya-Watson estimate at x: U_i = h^{-d} K((X_i - x)/h), V_i = Y_i fed
/// to the ratio estimator, so f_hat = D_hat, g_hat = N_hat, r_hat = R_hat.
inline NwPoint nw_estimate(std::span<const double> x, const SamplePath& path, const Kernel& kernel,
                           double h) {
  if (!(h > 0.0)) throw invalid_params("bandwidth h must be positive");
  if (!is_regression_kind(path.spec.kind)) throw invalid_spec("nw_estimate needs a regression path");
  if (static_cast<int>(x.size()) != path.dim || kernel.dim() != path.dim) {
    throw invalid_params("dimension mismatch between x, path and kernel");
  }
  RatioAccumulator acc;
  for (std::size_t i = 0; i < path.n; ++i) {
    acc.add(eval_scaled(kernel, x, path.x(i), h), path.second[i]);
  }
  const double n = static_cast<double>(path.n);
  return {acc.ratio(), acc.sum_u() / n, acc.sum_uv() / n};
}

inline NwPoint nw_estimate(double x, const SamplePath& path, const Kernel& kernel, double h) {
  return nw_estimate(std::span<const double>(&x, 1), path, kernel, h);
}

// Repeated evaluation on one path. Observations are sorted by (first
// coordinate, index) so each query only visits the kernel window; sums run
// in that sorted order, which is deterministic but not index order, so
// results match nw_estimate up to rounding.
class NwEvaluator {
public:
  NwEvaluator(const SamplePath& path, const Kernel& kernel) : kernel_(kernel), dim_(path.dim), n_(path.n) {
    if (!is_regression_kind(path.spec.kind)) throw invalid_spec("NwEvaluator needs a regression path");
    if (kernel.dim() != path.dim) throw invalid_params("kernel and path dimensions differ");
    const auto d = static_cast<std::size_t>(dim_);
    std::vector<std::size_t> order(n_);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double xa = path.first[a * d], xb = path.first[b * d];
      return xa < xb || (xa == xb && a < b);
    });
    lead_.resize(n_);
    x_.resize(n_ * d);
    y_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t i = order[k];
      lead_[k] = path.first[i * d];
      std::copy_n(path.first.begin() + static_cast<std::ptrdiff_t>(i * d), d,
                  x_.begin() + static_cast<std::ptrdiff_t>(k * d));
      y_[k] = path.second[i];
    }
  }

  [[nodiscard]] NwPoint operator()(std::span<const double> x, double h) const {
    if (!(h > 0.0)) throw invalid_params("bandwidth h must be positive");
    const double reach = h * kernel_.support_radius();
    const auto lo = std::lower_bound(lead_.begin(), lead_.end(), x[0] - reach) - lead_.begin();
    const auto hi = std::upper_bound(lead_.begin(), lead_.end(), x[0] + reach) - lead_.begin();
    const auto d = static_cast<std::size_t>(dim_);
    RatioAccumulator acc;
    for (auto k = static_cast<std::size_t>(lo); k < static_cast<std::size_t>(hi); ++k) {
      acc.add(eval_scaled(kernel_, x, std::span<const double>(x_).subspan(k * d, d), h), y_[k]);
    }
    const double n = static_cast<double>(n_);
    return {acc.ratio(), acc.sum_u() / n, acc.sum_uv() / n};
  }

  [[nodiscard]] NwPoint operator()(double x, double h) const {
    return (*this)(std::span<const double>(&x, 1), h);
  }

  [[nodiscard]] std::size_t size() const { return n_; }

private:
  Kernel kernel_;
  int dim_;
  std::size_t n_;
  std::vector<double> lead_;
  std::vector<double> x_;
  std::vector<double> y_;
};

struct SupDeviation {
  double sup_err = 0.0;
  std::size_t n_excluded = 0;
  std::size_t argmax = 0;
};

/// max over grid points with f_hat > 0 of |r_hat(x_k) - target_k|.
inline SupDeviation sup_deviation(const EvalGrid& grid, const NwEvaluator& eval, double h,
                                  std::span<const double> targets) {
  if (grid.size() == 0) throw invalid_params("grid must be nonempty");
  if (targets.size() != grid.size()) throw invalid_params("one target per grid point required");
  SupDeviation out;
  bool any = false;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto est = eval(grid.point(k), h);
    if (!est.r_hat) {
      ++out.n_excluded;
      continue;
    }
    const double err = std::abs(*est.r_hat - targets[k]);
    if (!any || err > out.sup_err) {
      out.sup_err = err;
      out.argmax = k;
    }
    any = true;
  }
  if (!any) throw all_excluded("f_hat = 0 at every grid point");
  return out;
}

// Deviation from the model's regression function r.
inline SupDeviation sup_deviation(const EvalGrid& grid, const SamplePath& path, const Kernel& kernel,
                                  double h, const ModelSpec& model) {
  std::vector<double> targets(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) targets[k] = model.regression(grid.point(k));
  return sup_deviation(grid, NwEvaluator(path, kernel), h, targets);
}

inline void write_grid_csv(std::ostream& os, const EvalGrid& grid, const NwEvaluator& eval, double h) {
  os << "x,r_hat,f_hat,g_hat,excluded\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto p = grid.point(k);
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (j) os << ';';
      write_number(os, p[j]);
    }
    const auto est = eval(p, h);
    os << ',' << (est.r_hat ? format_number(*est.r_hat) : std::string("nan")) << ','
       << format_number(est.f_hat) << ',' << format_number(est.g_hat) << ','
       << (est.r_hat ? 0 : 1) << '\n';
  }
}

// Biased (divide by n) sample autocovariance at lag ell.
inline double empirical_autocovariance(std::span<const double> z, std::size_t ell) {
  const std::size_t n = z.size();
  CompensatedSum s;
  for (double v : z) s.add(v);
  const double mean = s.value() / static_cast<double>(n);
  CompensatedSum acc;
  for (std::size_t i = 0; i + ell < n; ++i) acc.add((z[i] - mean) * (z[i + ell] - mean));
  return acc.value() / static_cast<double>(n);
}

enum class CensoredDenominator {
  squared_mean,   // gamma_C(l) + (E C)^2 = E[C_0 C_l]
  second_moment,  // gamma_C(l) + E C^2, the formula as printed
};

/// gamma_X(l) = gamma_Y(l) / (gamma_C(l) + (mean C)^2) for l = 1..ell_max,
/// from the observed (C_i, Y_i) only.
inline std::vector<double> censored_cov_estimate(const SamplePath& path, int ell_max,
                                                 CensoredDenominator rule = CensoredDenominator::squared_mean) {
  if (path.spec.kind != ProcessKind::censored) throw invalid_spec("censored path required");
  if (ell_max < 1 || static_cast<double>(ell_max) >= static_cast<double>(path.n) / 4.0) {
    throw invalid_params("need 1 <= ell_max < n/4");
  }
  const auto c = path.c();
  const auto y = path.y();
  CompensatedSum sc, sc2;
  for (double v : c) {
    sc.add(v);
    sc2.add(v * v);
  }
  const double n = static_cast<double>(path.n);
  const double mean_c = sc.value() / n;
  const double second = rule == CensoredDenominator::squared_mean ? mean_c * mean_c : sc2.value() / n;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(ell_max));
  for (int ell = 1; ell <= ell_max; ++ell) {
    const auto lag = static_cast<std::size_t>(ell);
    const double den = empirical_autocovariance(c, lag) + second;
    if (!(den > 1e-10)) throw degenerate_denominator("censoring covariance denominator <= 1e-10");
    out.push_back(empirical_autocovariance(y, lag) / den);
  }
  return out;
}

}  // namespace rml
