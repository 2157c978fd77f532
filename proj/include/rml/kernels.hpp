#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rml/errors.hpp"
#include "rml/quadrature.hpp"

namespace rml {

enum class KernelName { epanechnikov, triangle, quartic };

inline std::string_view to_string(KernelName k) {
  switch (k) {
    case KernelName::epanechnikov: return "epanechnikov";
    case KernelName::triangle: return "triangle";
    case KernelName::quartic: return "quartic";
  }
  return "?";
}

inline KernelName kernel_name_from_string(std::string_view s) {
  if (s == "epanechnikov") return KernelName::epanechnikov;
  if (s == "triangle") return KernelName::triangle;
  if (s == "quartic" || s == "biweight") return KernelName::quartic;
  throw unsupported_kernel(std::string(s));
}

// Nonnegative, Lipschitz product kernel on R^d with support [-1, 1]^d.
// Immutable after construction.
class Kernel {
public:
  [[nodiscard]] int dim() const { return d_; }
  [[nodiscard]] KernelName name() const { return name_; }
  [[nodiscard]] double support_radius() const { return 1.0; }
  // With respect to the l1 distance on R^d.
  [[nodiscard]] double lipschitz_const() const { return lipschitz_; }
  [[nodiscard]] int order() const { return 2; }

  // One-dimensional factor, integrating to 1 over [-1, 1].
  [[nodiscard]] double profile(double t) const {
    const double a = std::abs(t);
    if (a > 1.0) return 0.0;
    switch (name_) {
      case KernelName::epanechnikov: return 0.75 * (1.0 - t * t);
      case KernelName::triangle: return 1.0 - a;
      case KernelName::quartic: {
        const double w = 1.0 - t * t;
        return 0.9375 * w * w;
      }
    }
    return 0.0;
  }

  [[nodiscard]] double operator()(std::span<const double> u) const {
    double v = 1.0;
    for (double t : u) {
      v *= profile(t);
      if (v == 0.0) return 0.0;
    }
    return v;
  }

private:
  Kernel(KernelName name, int d, double lipschitz) : name_(name), d_(d), lipschitz_(lipschitz) {}
  friend Kernel make_kernel(KernelName, int);

  KernelName name_;
  int d_;
  double lipschitz_;
};

inline Kernel make_kernel(KernelName name, int d) {
  if (d < 1) throw invalid_params("kernel dimension must be >= 1");
  double slope = 0.0;
  double peak = 0.0;
  switch (name) {
    case KernelName::epanechnikov: slope = 1.5; peak = 0.75; break;
    case KernelName::triangle: slope = 1.0; peak = 1.0; break;
    case KernelName::quartic: slope = 2.5 / std::sqrt(3.0); peak = 0.9375; break;
  }
  return Kernel(name, d, slope * std::pow(peak, d - 1));
}

inline Kernel make_kernel(std::string_view name, int d) {
  return make_kernel(kernel_name_from_string(name), d);
}

/// h^{-d} K((center - x) / h).
inline double eval_scaled(const Kernel& k, std::span<const double> x,
                          std::span<const double> center, double h) {
  if (!(h > 0.0)) throw invalid_params("bandwidth h must be positive");
  const double inv_h = 1.0 / h;
  double v = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    v *= k.profile((center[j] - x[j]) * inv_h) * inv_h;
    if (v == 0.0) return 0.0;
  }
  return v;
}

// Scalar convenience for d = 1.
inline double eval_scaled(const Kernel& k, double x, double center, double h) {
  return eval_scaled(k, std::span<const double>(&x, 1), std::span<const double>(&center, 1), h);
}

struct MomentEntry {
  std::vector<int> multi_index;
  double value = 0.0;
};

struct OrderReport {
  double integral = 0.0;
  std::vector<MomentEntry> moments;  // every multi-index of degree 1..max_degree
  int verified_order = 0;            // degree of the first nonvanishing moment
  std::optional<MomentEntry> first_nonvanishing;
  bool normalized = false;
  bool vanishing_ok = false;  // all moments of degree < k vanish
  [[nodiscard]] bool ok() const { return normalized && vanishing_ok; }
};

namespace detail {

inline void multi_indices(int d, int degree, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == d - 1) {
    cur.push_back(degree);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int l = degree; l >= 0; --l) {
    cur.push_back(l);
    multi_indices(d, degree - l, cur, out);
    cur.pop_back();
  }
}

struct MomentSweep {
  double integral = 0.0;
  std::vector<std::vector<int>> indices;
  std::vector<double> values;
};

inline MomentSweep sweep_moments(const Kernel& k, int max_degree, std::size_t panels_per_half) {
  const int d = k.dim();
  const double r = k.support_radius();
  const std::vector<double> breaks{-r, 0.0, r};
  const auto axis = quad::composite(breaks, panels_per_half);
  std::vector<quad::AxisRule> axes(static_cast<std::size_t>(d), axis);

  MomentSweep sw;
  for (int deg = 1; deg <= max_degree; ++deg) {
    std::vector<int> cur;
    detail::multi_indices(d, deg, cur, sw.indices);
  }
  double integral = 0.0;
  std::vector<double> acc(sw.indices.size(), 0.0);
  // One pass over the tensor grid accumulates every monomial moment.
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> point(static_cast<std::size_t>(d));
  while (true) {
    double w = 1.0;
    for (std::size_t j = 0; j < point.size(); ++j) {
      point[j] = axes[j].points[idx[j]];
      w *= axes[j].weights[idx[j]];
    }
    const double kv = w * k(point);
    if (kv != 0.0) {
      integral += kv;
      for (std::size_t m = 0; m < sw.indices.size(); ++m) {
        double mono = 1.0;
        for (std::size_t j = 0; j < point.size(); ++j) {
          for (int e = 0; e < sw.indices[m][j]; ++e) mono *= point[j];
        }
        acc[m] += kv * mono;
      }
    }
    std::size_t j = 0;
    while (j < point.size() && ++idx[j] == axes[j].points.size()) {
      idx[j] = 0;
      ++j;
    }
    if (j == point.size()) break;
  }
  sw.integral = integral;
  sw.values = acc;
  return sw;
}

}  // namespace detail

/// Integrates K and every monomial moment of degree 1 and 2 with a 256-point
/// per-axis composite Gauss-Legendre rule, cross-checked against 128 points
/// per axis. A nonnegative kernel always has a positive second moment, so the
/// verified order is at most 2; verified_order = 3 would mean none was found.
inline OrderReport verify_order(const Kernel& kernel, int k, double norm_tol = 1e-6,
                                double moment_tol = 1e-8) {
  if (k != 1 && k != 2) throw invalid_params("verify_order supports k in {1, 2}");
  if (!(norm_tol > 0.0) || !(moment_tol > 0.0)) throw invalid_params("tolerances must be positive");
  if (kernel.dim() > 3) {
    throw quadrature_failure("tensor quadrature limited to d <= 3");
  }
  constexpr int max_degree = 2;
  // 2 segments x 16 panels x 8 nodes = 256 nodes per axis.
  const auto fine = detail::sweep_moments(kernel, max_degree, 16);
  const auto coarse = detail::sweep_moments(kernel, max_degree, 8);

  if (std::abs(fine.integral - coarse.integral) > norm_tol) {
    throw quadrature_failure("normalization unresolved at 256 nodes per axis");
  }
  for (std::size_t m = 0; m < fine.values.size(); ++m) {
    if (std::abs(fine.values[m] - coarse.values[m]) > moment_tol) {
      throw quadrature_failure("moment unresolved at 256 nodes per axis");
    }
  }

  OrderReport rep;
  rep.integral = fine.integral;
  rep.normalized = std::abs(fine.integral - 1.0) <= norm_tol;
  rep.vanishing_ok = true;
  for (std::size_t m = 0; m < fine.values.size(); ++m) {
    int degree = 0;
    for (int l : fine.indices[m]) degree += l;
    rep.moments.push_back({fine.indices[m], fine.values[m]});
    const bool vanishes = std::abs(fine.values[m]) <= moment_tol;
    if (!vanishes && !rep.first_nonvanishing) {
      rep.first_nonvanishing = rep.moments.back();
      rep.verified_order = degree;
    }
    if (degree < k && !vanishes) rep.vanishing_ok = false;
  }
  if (!rep.first_nonvanishing) rep.verified_order = max_degree + 1;
  return rep;
}

}  // namespace rml
