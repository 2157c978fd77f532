#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rml/errors.hpp"
#include "rml/rng.hpp"

namespace rml {

namespace detail {

inline void sort_atoms(std::vector<double>& values, std::vector<double>& probs) {
  if (values.size() != probs.size() || values.empty()) {
    throw invalid_spec("discrete law needs matching nonempty values and probs");
  }
  std::vector<std::pair<double, double>> atoms;
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(probs[i] >= 0.0)) throw invalid_spec("discrete law probabilities must be >= 0");
    atoms.emplace_back(values[i], probs[i]);
    total += probs[i];
  }
  if (std::abs(total - 1.0) > 1e-9) throw invalid_spec("discrete law probabilities must sum to 1");
  std::sort(atoms.begin(), atoms.end());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    values[i] = atoms[i].first;
    probs[i] = atoms[i].second / total;
  }
}

inline double discrete_quantile(const std::vector<double>& values, const std::vector<double>& probs,
                                double t) {
  double cum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    cum += probs[i];
    if (t <= cum) return values[i];
  }
  return values.back();
}

}  // namespace detail

enum class LawKind { constant, uniform, exponential, discrete };

// Marginal law of the nonnegative weights U.
struct MarginalLaw {
  LawKind kind = LawKind::constant;
  double a = 1.0;  // constant value, uniform lower end, or exponential mean
  double b = 1.0;  // uniform upper end
  std::vector<double> values;
  std::vector<double> probs;

  static MarginalLaw constant(double c) { return {LawKind::constant, c, c, {}, {}}; }
  static MarginalLaw uniform(double lo, double hi) { return {LawKind::uniform, lo, hi, {}, {}}; }
  static MarginalLaw exponential(double mean) { return {LawKind::exponential, mean, 0.0, {}, {}}; }
  static MarginalLaw discrete(std::vector<double> v, std::vector<double> p) {
    detail::sort_atoms(v, p);
    return {LawKind::discrete, 0.0, 0.0, std::move(v), std::move(p)};
  }

  void validate_nonnegative() const {
    switch (kind) {
      case LawKind::constant:
        if (!(a >= 0.0)) throw invalid_spec("U law: constant must be >= 0");
        break;
      case LawKind::uniform:
        if (!(a >= 0.0 && b > a)) throw invalid_spec("U law: need 0 <= lo < hi");
        break;
      case LawKind::exponential:
        if (!(a > 0.0)) throw invalid_spec("U law: exponential mean must be > 0");
        break;
      case LawKind::discrete:
        if (values.empty() || values.front() < 0.0) throw invalid_spec("U law: atoms must be >= 0");
        break;
    }
  }

  [[nodiscard]] double mean() const {
    switch (kind) {
      case LawKind::constant: return a;
      case LawKind::uniform: return 0.5 * (a + b);
      case LawKind::exponential: return a;
      case LawKind::discrete:
        return std::inner_product(values.begin(), values.end(), probs.begin(), 0.0);
    }
    return 0.0;
  }

  [[nodiscard]] double variance() const {
    switch (kind) {
      case LawKind::constant: return 0.0;
      case LawKind::uniform: return (b - a) * (b - a) / 12.0;
      case LawKind::exponential: return a * a;
      case LawKind::discrete: {
        const double m = mean();
        double v = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) v += probs[i] * (values[i] - m) * (values[i] - m);
        return v;
      }
    }
    return 0.0;
  }

  // Left-continuous inverse CDF on (0, 1).
  [[nodiscard]] double quantile(double t) const {
    switch (kind) {
      case LawKind::constant: return a;
      case LawKind::uniform: return a + (b - a) * t;
      case LawKind::exponential: return -a * std::log1p(-t);
      case LawKind::discrete: return detail::discrete_quantile(values, probs, t);
    }
    return 0.0;
  }

  [[nodiscard]] double sample(CounterRng& rng) const { return quantile(rng.uniform()); }

  [[nodiscard]] bool finitely_supported() const {
    return kind == LawKind::constant || kind == LawKind::discrete;
  }
};

enum class NoiseKind { none, normal, student_t, discrete };

// Additive noise of V (or Y).
struct NoiseLaw {
  NoiseKind kind = NoiseKind::none;
  double scale = 0.0;  // sd for normal, multiplier for student t
  int dof = 0;
  std::vector<double> values;
  std::vector<double> probs;

  static NoiseLaw none() { return {}; }
  static NoiseLaw normal(double sd) { return {NoiseKind::normal, sd, 0, {}, {}}; }
  static NoiseLaw student_t(int dof, double scale) { return {NoiseKind::student_t, scale, dof, {}, {}}; }
  static NoiseLaw discrete(std::vector<double> v, std::vector<double> p) {
    detail::sort_atoms(v, p);
    return {NoiseKind::discrete, 0.0, 0, std::move(v), std::move(p)};
  }

  void validate() const {
    if (kind == NoiseKind::normal && !(scale >= 0.0)) throw invalid_spec("noise sd must be >= 0");
    if (kind == NoiseKind::student_t && (dof < 1 || !(scale >= 0.0))) {
      throw invalid_spec("student t noise needs dof >= 1 and scale >= 0");
    }
  }

  [[nodiscard]] double mean() const {
    if (kind == NoiseKind::discrete) {
      return std::inner_product(values.begin(), values.end(), probs.begin(), 0.0);
    }
    return 0.0;
  }

  [[nodiscard]] double variance() const {
    switch (kind) {
      case NoiseKind::none: return 0.0;
      case NoiseKind::normal: return scale * scale;
      case NoiseKind::student_t:
        return dof > 2 ? scale * scale * dof / (dof - 2.0) : std::numeric_limits<double>::infinity();
      case NoiseKind::discrete: {
        const double m = mean();
        double v = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) v += probs[i] * (values[i] - m) * (values[i] - m);
        return v;
      }
    }
    return 0.0;
  }

  [[nodiscard]] double sample(CounterRng& rng) const {
    switch (kind) {
      case NoiseKind::none: return 0.0;
      case NoiseKind::normal: return scale * rng.normal();
      case NoiseKind::student_t: return scale * rng.student_t(dof);
      case NoiseKind::discrete: return detail::discrete_quantile(values, probs, rng.uniform());
    }
    return 0.0;
  }

  // Noise driven by a standard Gaussian latent z (used by dependent processes).
  [[nodiscard]] double from_gaussian(double z) const {
    switch (kind) {
      case NoiseKind::none: return 0.0;
      case NoiseKind::normal: return scale * z;
      case NoiseKind::discrete: return detail::discrete_quantile(values, probs, normal_cdf(z));
      case NoiseKind::student_t:
        throw invalid_spec("student t noise is only available for i.i.d. pairs");
    }
    return 0.0;
  }

  [[nodiscard]] bool finitely_supported() const {
    return kind == NoiseKind::none || kind == NoiseKind::discrete;
  }
};

}  // namespace rml
