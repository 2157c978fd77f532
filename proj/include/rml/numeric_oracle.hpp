#pragma once

// Ground-truth values computed independently of the estimators: tensor
// quadrature for kernel expectations, closed-form moment algebra for the
// delta-method variance, and exhaustive enumeration for small discrete
// instances. Nothing here calls eval_scaled or the ratio accumulator.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "rml/errors.hpp"
#include "rml/kernels.hpp"
#include "rml/laws.hpp"
#include "rml/models.hpp"
#include "rml/processes.hpp"
#include "rml/quadrature.hpp"

namespace rml {

struct QuadratureSpec {
  std::size_t nodes = 64;  // Gauss-Legendre nodes per smooth segment, coarse level
  double tol = 1e-10;      // absolute agreement required between levels

  void validate() const {
    if (nodes < 64) throw invalid_params("quadrature needs >= 64 nodes per segment");
    if (!(tol > 0.0)) throw invalid_params("quadrature tolerance must be positive");
  }
};

namespace detail {

// Axis rule on u in [-1, 1] for the point x_j, split wherever the kernel
// (0) or the design density ((b - x_j)/h) loses smoothness.
inline quad::AxisRule oracle_axis(const RegressionModel& model, double xj, double h,
                                  std::size_t panels) {
  std::vector<double> extra{0.0};
  for (double b : model.density_breakpoints()) extra.push_back((b - xj) / h);
  const auto bp = quad::clip_breakpoints(-1.0, 1.0, std::move(extra));
  return quad::composite(bp, panels);
}

// Integral of F(x + h u) K(u) over u, at two resolutions.
template <class F>
double convolve(const RegressionModel& model, const Kernel& kernel, std::span<const double> x,
                double h, const QuadratureSpec& qs, F&& integrand) {
  qs.validate();
  if (!(h > 0.0)) throw invalid_params("bandwidth h must be positive");
  if (static_cast<int>(x.size()) != model.d || kernel.dim() != model.d) {
    throw invalid_params("dimension mismatch between x, model and kernel");
  }
  const std::size_t coarse = (qs.nodes + 7) / 8;
  std::vector<double> shifted(x.size());
  auto run = [&](std::size_t panels) {
    std::vector<quad::AxisRule> axes;
    for (double xj : x) axes.push_back(oracle_axis(model, xj, h, panels));
    return quad::tensor_integrate(axes, [&](std::span<const double> u) {
      const double k = kernel(u);
      if (k == 0.0) return 0.0;
      for (std::size_t j = 0; j < u.size(); ++j) shifted[j] = x[j] + h * u[j];
      return k * integrand(std::span<const double>(shifted));
    });
  };
  const double lo = run(coarse);
  const double hi = run(2 * coarse);
  if (!(std::abs(hi - lo) <= qs.tol)) throw quadrature_failure("resolutions disagree beyond tolerance");
  return hi;
}

}  // namespace detail

/// E f_hat(x) = (f * K_h)(x) = int f(x + h u) K(u) du.
inline double expected_fhat(const RegressionModel& model, const Kernel& kernel,
                            std::span<const double> x, double h, const QuadratureSpec& qs = {}) {
  return detail::convolve(model, kernel, x, h, qs,
                          [&](std::span<const double> z) { return model.density(z); });
}

/// E g_hat(x) = int r(x + h u) f(x + h u) K(u) du.
inline double expected_ghat(const RegressionModel& model, const Kernel& kernel,
                            std::span<const double> x, double h, const QuadratureSpec& qs = {}) {
  if (model.response == ResponseKind::constant) {
    return model.response_constant * expected_fhat(model, kernel, x, h, qs);
  }
  return detail::convolve(model, kernel, x, h, qs, [&](std::span<const double> z) {
    const double f = model.density(z);
    return f == 0.0 ? 0.0 : model.regression(z) * f;
  });
}

/// |r(x) - E g_hat(x) / E f_hat(x)|.
inline double bias_at(const RegressionModel& model, const Kernel& kernel, std::span<const double> x,
                      double h, const QuadratureSpec& qs = {}) {
  const double f = expected_fhat(model, kernel, x, h, qs);
  if (!(f > 0.0)) throw degenerate_denominator("E f_hat(x) = 0");
  // Constant r: E g_hat = c E f_hat, so the bias is identically zero.
  if (model.response == ResponseKind::constant) return 0.0;
  return std::abs(model.regression(x) - expected_ghat(model, kernel, x, h, qs) / f);
}

inline double expected_fhat(const RegressionModel& m, const Kernel& k, double x, double h,
                            const QuadratureSpec& qs = {}) {
  return expected_fhat(m, k, std::span<const double>(&x, 1), h, qs);
}
inline double expected_ghat(const RegressionModel& m, const Kernel& k, double x, double h,
                            const QuadratureSpec& qs = {}) {
  return expected_ghat(m, k, std::span<const double>(&x, 1), h, qs);
}
inline double bias_at(const RegressionModel& m, const Kernel& k, double x, double h,
                      const QuadratureSpec& qs = {}) {
  return bias_at(m, k, std::span<const double>(&x, 1), h, qs);
}

// E|Z|^p for Z ~ N(0, 1).
inline double normal_abs_moment(double p) {
  if (!(p > 0.0)) throw invalid_params("moment order must be positive");
  return std::pow(2.0, p / 2.0) * std::tgamma((p + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
}

namespace detail {

// Raw moment E U^k of a marginal law, from its defining formula.
inline double raw_moment(const MarginalLaw& law, int k) {
  switch (law.kind) {
    case LawKind::constant: return std::pow(law.a, k);
    case LawKind::uniform:
      return (std::pow(law.b, k + 1) - std::pow(law.a, k + 1)) / ((k + 1) * (law.b - law.a));
    case LawKind::exponential: return std::tgamma(k + 1.0) * std::pow(law.a, k);
    case LawKind::discrete: {
      double s = 0.0;
      for (std::size_t i = 0; i < law.values.size(); ++i) s += law.probs[i] * std::pow(law.values[i], k);
      return s;
    }
  }
  return 0.0;
}

// E eps^k for k in {1, 2}.
inline double raw_moment(const NoiseLaw& law, int k) {
  switch (law.kind) {
    case NoiseKind::none: return 0.0;
    case NoiseKind::normal: return k == 1 ? 0.0 : law.scale * law.scale;
    case NoiseKind::student_t:
      if (k == 1) return 0.0;
      if (law.dof <= 2) throw invalid_spec("student t noise needs dof > 2 for a finite variance");
      return law.scale * law.scale * law.dof / (law.dof - 2.0);
    case NoiseKind::discrete: {
      double s = 0.0;
      for (std::size_t i = 0; i < law.values.size(); ++i) s += law.probs[i] * std::pow(law.values[i], k);
      return s;
    }
  }
  return 0.0;
}

}  // namespace detail

/// sigma^2 = Var(U V - R U) / (E U)^2 for an i.i.d. pair spec. With
/// V - R = b + s U + eps (eps independent of U) the numerator expands into
/// raw moments of U up to order four and of eps up to order two.
inline double delta_method_variance(const ProcessSpec& spec) {
  if (spec.kind != ProcessKind::iid_pairs) {
    throw invalid_spec("delta-method oracle covers i.i.d. pairs only");
  }
  validate(spec);
  const auto& m = spec.pairs;
  const double m1 = detail::raw_moment(m.u, 1);
  const double m2 = detail::raw_moment(m.u, 2);
  const double m3 = detail::raw_moment(m.u, 3);
  const double m4 = detail::raw_moment(m.u, 4);
  const double e1 = detail::raw_moment(m.noise, 1);
  const double e2 = detail::raw_moment(m.noise, 2);
  const double s = m.v_slope;
  const double r = m.v_mean + e1 + s * (m2 - m1 * m1) / m1;
  const double b = m.v_mean - s * m1 - r;
  const double mean_w = b * m1 + s * m2 + e1 * m1;
  const double second_w = b * b * m2 + 2.0 * b * s * m3 + s * s * m4 +
                          2.0 * e1 * (b * m2 + s * m3) + m2 * e2;
  return (second_w - mean_w * mean_w) / (m1 * m1);
}

struct BruteForceResult {
  double moment = 0.0;                // E[|Delta_n|^p | sum U > 0]
  double excluded_probability = 0.0;  // P(sum U = 0)
  double target = 0.0;                // R used as centering
  std::uint64_t states = 0;
};

/// Exact E|R_hat - R|^p by enumerating every outcome of n i.i.d. pairs with
/// finitely supported U and noise. Outcomes with sum U = 0 are left out and
/// their probability reported; the moment is conditional on sum U > 0,
/// matching how Monte Carlo replications exclude them.
inline BruteForceResult brute_force_moment(const ProcessSpec& spec, int n, double p,
                                           std::uint64_t max_states = 10'000'000) {
  if (spec.kind != ProcessKind::iid_pairs) throw invalid_spec("enumeration covers i.i.d. pairs only");
  if (n < 1 || n > 12) throw invalid_params("enumeration needs 1 <= n <= 12");
  if (!(p > 0.0)) throw invalid_params("moment order must be positive");
  validate(spec);
  const auto& m = spec.pairs;
  if (!m.u.finitely_supported() || !m.noise.finitely_supported()) {
    throw invalid_spec("enumeration needs finitely supported U and noise");
  }
  std::vector<double> uv, up, ev, ep;
  if (m.u.kind == LawKind::constant) {
    uv = {m.u.a};
    up = {1.0};
  } else {
    uv = m.u.values;
    up = m.u.probs;
  }
  if (m.noise.kind == NoiseKind::none) {
    ev = {0.0};
    ep = {1.0};
  } else {
    ev = m.noise.values;
    ep = m.noise.probs;
  }
  const double eu = detail::raw_moment(m.u, 1);
  // Atoms of a single (U, V) draw.
  std::vector<double> au, av, ap;
  for (std::size_t i = 0; i < uv.size(); ++i) {
    for (std::size_t j = 0; j < ev.size(); ++j) {
      au.push_back(uv[i]);
      av.push_back(m.v_mean + m.v_slope * (uv[i] - eu) + ev[j]);
      ap.push_back(up[i] * ep[j]);
    }
  }
  const std::size_t k = au.size();
  double states = 1.0;
  for (int i = 0; i < n; ++i) states *= static_cast<double>(k);
  if (states > static_cast<double>(max_states)) throw state_space_too_large("enumeration too large");

  // R from the atoms themselves: E[UV] / E[U].
  double euv = 0.0, eu_atoms = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    euv += ap[a] * au[a] * av[a];
    eu_atoms += ap[a] * au[a];
  }
  BruteForceResult out;
  out.target = euv / eu_atoms;
  out.states = static_cast<std::uint64_t>(states);

  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  double included = 0.0, acc = 0.0;
  while (true) {
    double prob = 1.0, su = 0.0, suv = 0.0;
    for (std::size_t a : idx) {
      prob *= ap[a];
      su += au[a];
      suv += au[a] * av[a];
    }
    if (su > 0.0) {
      included += prob;
      acc += prob * std::pow(std::abs(suv / su - out.target), p);
    } else {
      out.excluded_probability += prob;
    }
    std::size_t j = 0;
    while (j < idx.size() && ++idx[j] == k) {
      idx[j] = 0;
      ++j;
    }
    if (j == idx.size()) break;
  }
  if (!(included > 0.0)) throw all_excluded("sum U = 0 with probability one");
  out.moment = acc / included;
  return out;
}

}  // namespace rml
