#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "rml/errors.hpp"

namespace rml::quad {

struct Rule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre rule of the given order via Newton iteration on P_n.
inline Rule gauss_legendre(std::size_t order) {
  Rule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const std::size_t half = (order + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(order) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= order; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      dp = static_cast<double>(order) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

// Points and weights of a composite rule on the union of segments between
// consecutive breakpoints. Each segment gets `panels` panels of `order` nodes.
struct AxisRule {
  std::vector<double> points;
  std::vector<double> weights;
};

inline AxisRule composite(std::span<const double> breakpoints, std::size_t panels,
                          std::size_t order = 8) {
  static const Rule base8 = gauss_legendre(8);
  const Rule base = order == 8 ? base8 : gauss_legendre(order);
  AxisRule out;
  for (std::size_t s = 0; s + 1 < breakpoints.size(); ++s) {
    const double a = breakpoints[s];
    const double b = breakpoints[s + 1];
    if (!(b > a)) continue;
    const double width = (b - a) / static_cast<double>(panels);
    for (std::size_t k = 0; k < panels; ++k) {
      const double lo = a + width * static_cast<double>(k);
      const double mid = lo + 0.5 * width;
      for (std::size_t j = 0; j < base.nodes.size(); ++j) {
        out.points.push_back(mid + 0.5 * width * base.nodes[j]);
        out.weights.push_back(0.5 * width * base.weights[j]);
      }
    }
  }
  return out;
}

// Sorted, deduplicated breakpoints clipped to [lo, hi], always including both ends.
inline std::vector<double> clip_breakpoints(double lo, double hi, std::vector<double> extra) {
  extra.push_back(lo);
  extra.push_back(hi);
  std::vector<double> out;
  for (double b : extra) {
    if (b >= lo && b <= hi) out.push_back(b);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Integrates f over the tensor product of per-axis rules; f receives a span
// of d coordinates.
template <class F>
double tensor_integrate(std::span<const AxisRule> axes, F&& f) {
  const std::size_t d = axes.size();
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> point(d);
  double total = 0.0;
  for (const auto& ax : axes) {
    if (ax.points.empty()) return 0.0;
  }
  while (true) {
    double w = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      point[j] = axes[j].points[idx[j]];
      w *= axes[j].weights[idx[j]];
    }
    total += w * f(std::span<const double>(point));
    std::size_t j = 0;
    while (j < d && ++idx[j] == axes[j].points.size()) {
      idx[j] = 0;
      ++j;
    }
    if (j == d) break;
  }
  return total;
}

}  // namespace rml::quad
