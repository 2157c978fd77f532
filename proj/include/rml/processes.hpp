#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rml/csv.hpp"
#include "rml/errors.hpp"
#include "rml/laws.hpp"
#include "rml/models.hpp"
#include "rml/moment_params.hpp"
#include "rml/rng.hpp"

namespace rml {

enum class ProcessKind { iid_pairs, ar1_pairs, ma_pairs, iid_regression, ar1_regression, censored };

inline std::string_view to_string(ProcessKind k) {
  switch (k) {
    case ProcessKind::iid_pairs: return "iid_pairs";
    case ProcessKind::ar1_pairs: return "ar1_pairs";
    case ProcessKind::ma_pairs: return "ma_pairs";
    case ProcessKind::iid_regression: return "iid_regression";
    case ProcessKind::ar1_regression: return "ar1_regression";
    case ProcessKind::censored: return "censored";
  }
  return "?";
}

inline ProcessKind process_kind_from_string(std::string_view s) {
  for (auto k : {ProcessKind::iid_pairs, ProcessKind::ar1_pairs, ProcessKind::ma_pairs,
                 ProcessKind::iid_regression, ProcessKind::ar1_regression, ProcessKind::censored}) {
    if (to_string(k) == s) return k;
  }
  throw invalid_spec("unknown process kind '" + std::string(s) + "'");
}

inline bool is_pair_kind(ProcessKind k) {
  return k == ProcessKind::iid_pairs || k == ProcessKind::ar1_pairs || k == ProcessKind::ma_pairs;
}
inline bool is_regression_kind(ProcessKind k) {
  return k == ProcessKind::iid_regression || k == ProcessKind::ar1_regression;
}

// V = v_mean + v_slope * (U - E U) + noise, with the noise independent of U.
struct PairModel {
  MarginalLaw u = MarginalLaw::constant(1.0);
  double v_mean = 0.0;
  double v_slope = 0.0;
  NoiseLaw noise = NoiseLaw::normal(1.0);
};

// Gaussian moving average with coefficients (1 + |j|)^{-decay}, |j| <= truncation
// (j >= 0 only when one-sided), normalized to unit variance.
struct MovingAverage {
  double decay = 3.0;
  int truncation = 200;
  bool two_sided = true;
};

// Observed Y_i = C_i X_i with C_i ~ Bernoulli(keep_prob) i.i.d. and X a
// centered Gaussian AR(1) with coefficient ar_coef.
struct CensoringModel {
  double keep_prob = 1.0;
  double innovation_sd = 1.0;
};

struct ProcessSpec {
  ProcessKind kind = ProcessKind::iid_pairs;
  PairModel pairs;
  RegressionModel regression;
  CensoringModel censoring;
  double ar_coef = 0.0;
  MovingAverage ma;
  DependenceSpec dependence;

  // R = E[U V] / E[U] for pair kinds.
  [[nodiscard]] double ratio_truth() const {
    const double eu = pairs.u.mean();
    return pairs.v_mean + pairs.noise.mean() + pairs.v_slope * pairs.u.variance() / eu;
  }

  // Autocovariance of the uncensored X at lag ell (censored kind).
  [[nodiscard]] double gamma_x(int ell) const {
    const double a = ar_coef;
    const double var = censoring.innovation_sd * censoring.innovation_sd / (1.0 - a * a);
    return std::pow(a, std::abs(ell)) * var;
  }
};

inline void validate(const ProcessSpec& spec) {
  if (spec.kind == ProcessKind::ar1_pairs || spec.kind == ProcessKind::ar1_regression ||
      spec.kind == ProcessKind::censored) {
    if (!(std::abs(spec.ar_coef) < 1.0)) throw invalid_spec("AR coefficient needs |a| < 1");
  }
  if (is_pair_kind(spec.kind)) {
    spec.pairs.u.validate_nonnegative();
    spec.pairs.noise.validate();
    if (!(spec.pairs.u.mean() > 0.0)) throw invalid_spec("E U must be positive");
    if (spec.kind != ProcessKind::iid_pairs && spec.pairs.noise.kind == NoiseKind::student_t) {
      throw invalid_spec("student t noise is only available for i.i.d. pairs");
    }
  }
  if (spec.kind == ProcessKind::ma_pairs) {
    if (!(spec.ma.decay > 1.0)) throw invalid_spec("MA decay exponent must exceed 1");
    if (spec.ma.truncation < 0) throw invalid_spec("MA truncation must be >= 0");
  }
  if (is_regression_kind(spec.kind)) spec.regression.validate();
  if (spec.kind == ProcessKind::censored) {
    const double pi = spec.censoring.keep_prob;
    if (!(pi > 0.0 && pi <= 1.0)) throw invalid_spec("censoring probability must lie in (0, 1]");
    if (!(spec.censoring.innovation_sd > 0.0)) throw invalid_spec("innovation sd must be > 0");
  }
}

namespace detail {

inline DependenceSpec declared_dependence(const ProcessSpec& spec) {
  constexpr double geometric = std::numeric_limits<double>::infinity();
  switch (spec.kind) {
    case ProcessKind::iid_pairs:
    case ProcessKind::iid_regression:
      return {DependenceKind::iid, 0.0, std::nullopt, ConditionSet::first};
    case ProcessKind::ar1_pairs:
    case ProcessKind::ar1_regression:
    case ProcessKind::censored:
      // Gaussian AR(1): geometric decay dominates any polynomial threshold.
      return {spec.ar_coef == 0.0 ? DependenceKind::iid : DependenceKind::strong_mixing,
              spec.ar_coef == 0.0 ? 0.0 : geometric, std::nullopt, ConditionSet::first};
    case ProcessKind::ma_pairs:
      // Linear process with |theta_j| ~ j^{-decay}: coefficients of order
      // sum_{j >= i} |theta_j| ~ i^{1 - decay}.
      return {spec.ma.two_sided ? DependenceKind::lambda_weak : DependenceKind::causal_gamma,
              spec.ma.decay - 1.0, std::nullopt, ConditionSet::first};
  }
  return {};
}

}  // namespace detail

inline ProcessSpec make_iid_pairs(PairModel model) {
  ProcessSpec s;
  s.kind = ProcessKind::iid_pairs;
  s.pairs = std::move(model);
  validate(s);
  s.dependence = detail::declared_dependence(s);
  return s;
}

inline ProcessSpec make_ar1_pairs(PairModel model, double a) {
  ProcessSpec s;
  s.kind = ProcessKind::ar1_pairs;
  s.pairs = std::move(model);
  s.ar_coef = a;
  validate(s);
  s.dependence = detail::declared_dependence(s);
  return s;
}

inline ProcessSpec make_ma_pairs(PairModel model, MovingAverage ma) {
  ProcessSpec s;
  s.kind = ProcessKind::ma_pairs;
  s.pairs = std::move(model);
  s.ma = ma;
  validate(s);
  s.dependence = detail::declared_dependence(s);
  return s;
}

inline ProcessSpec make_iid_regression(RegressionModel model) {
  ProcessSpec s;
  s.kind = ProcessKind::iid_regression;
  s.regression = model;
  validate(s);
  s.dependence = detail::declared_dependence(s);
  return s;
}

inline ProcessSpec make_ar1_regression(RegressionModel model, double a) {
  ProcessSpec s;
  s.kind = ProcessKind::ar1_regression;
  s.regression = model;
  s.ar_coef = a;
  validate(s);
  s.dependence = detail::declared_dependence(s);
  return s;
}

inline ProcessSpec make_censored(double a, double innovation_sd, double keep_prob) {
  ProcessSpec s;
  s.kind = ProcessKind::censored;
  s.ar_coef = a;
  s.censoring = {keep_prob, innovation_sd};
  validate(s);
  s.dependence = detail::declared_dependence(s);
  return s;
}

// Default regression instance: X ~ Uniform(0,1), r(x) = sin(2 pi x), noise sd 0.3.
inline RegressionModel default_regression_model() { return RegressionModel{}; }

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint32_t replication_index = 0;
};

struct SamplePath {
  std::size_t n = 0;
  int dim = 1;
  std::vector<double> first;   // U_i, X_i (row-major n x dim) or C_i
  std::vector<double> second;  // V_i or Y_i
  std::vector<double> latent;  // uncensored X_i, censored paths only
  ProcessSpec spec;
  SeedSpec seed;

  [[nodiscard]] std::span<const double> u() const { return first; }
  [[nodiscard]] std::span<const double> v() const { return second; }
  [[nodiscard]] std::span<const double> c() const { return first; }
  [[nodiscard]] std::span<const double> y() const { return second; }
  [[nodiscard]] std::span<const double> x(std::size_t i) const {
    return std::span<const double>(first).subspan(i * static_cast<std::size_t>(dim),
                                                  static_cast<std::size_t>(dim));
  }
};

namespace detail {

// Stationary Gaussian AR(1) with unit marginal variance.
inline void fill_unit_ar1(std::span<double> out, double a, CounterRng& rng) {
  if (out.empty()) return;
  const double innov = std::sqrt(1.0 - a * a);
  out[0] = rng.normal();
  for (std::size_t i = 1; i < out.size(); ++i) out[i] = a * out[i - 1] + innov * rng.normal();
}

// Gaussian moving average normalized to unit marginal variance.
inline void fill_unit_ma(std::span<double> out, const MovingAverage& ma, CounterRng& rng) {
  const int trunc = ma.truncation;
  const int lo = ma.two_sided ? -trunc : 0;
  std::vector<double> theta;
  double norm2 = 0.0;
  for (int j = lo; j <= trunc; ++j) {
    const double t = std::pow(1.0 + std::abs(j), -ma.decay);
    theta.push_back(t);
    norm2 += t * t;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  const std::size_t width = theta.size();
  std::vector<double> xi(out.size() + width - 1);
  for (double& e : xi) e = rng.normal();
  // out[i] = sum_j theta_j xi_{i - j}, with xi shifted so indices are nonnegative.
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < width; ++k) acc += theta[k] * xi[i + width - 1 - k];
    out[i] = acc * inv;
  }
}

inline double open_unit(double t) {
  constexpr double lo = 0x1.0p-60;
  constexpr double hi = 1.0 - 0x1.0p-53;
  return std::clamp(t, lo, hi);
}

}  // namespace detail

/// Stationary (U_i, V_i) path; U_i >= 0 always.
inline SamplePath simulate_pairs(const ProcessSpec& spec, std::size_t n, SeedSpec seed) {
  if (!is_pair_kind(spec.kind)) throw invalid_spec("simulate_pairs needs a pair kind");
  if (n < 1) throw invalid_spec("n must be >= 1");
  validate(spec);
  SamplePath path;
  path.n = n;
  path.spec = spec;
  path.seed = seed;
  path.first.resize(n);
  path.second.resize(n);
  const PairModel& m = spec.pairs;
  const double eu = m.u.mean();
  CounterRng rng_u(seed.master_seed, seed.replication_index, Stream::u_latent);
  CounterRng rng_v(seed.master_seed, seed.replication_index, Stream::v_noise);

  if (spec.kind == ProcessKind::iid_pairs) {
    for (std::size_t i = 0; i < n; ++i) {
      const double u = m.u.sample(rng_u);
      path.first[i] = u;
      path.second[i] = m.v_mean + m.v_slope * (u - eu) + m.noise.sample(rng_v);
    }
    return path;
  }

  std::vector<double> zu(n), zv(n);
  if (spec.kind == ProcessKind::ar1_pairs) {
    detail::fill_unit_ar1(zu, spec.ar_coef, rng_u);
    detail::fill_unit_ar1(zv, spec.ar_coef, rng_v);
  } else {
    detail::fill_unit_ma(zu, spec.ma, rng_u);
    detail::fill_unit_ma(zv, spec.ma, rng_v);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double u = m.u.quantile(detail::open_unit(normal_cdf(zu[i])));
    path.first[i] = u;
    path.second[i] = m.v_mean + m.v_slope * (u - eu) + m.noise.from_gaussian(zv[i]);
  }
  return path;
}

/// Stationary (X_i, Y_i) path with Y_i = r(X_i) + noise.
inline SamplePath simulate_regression(const ProcessSpec& spec, std::size_t n, SeedSpec seed) {
  if (!is_regression_kind(spec.kind)) throw invalid_spec("simulate_regression needs a regression kind");
  if (n < 1) throw invalid_spec("n must be >= 1");
  validate(spec);
  const RegressionModel& model = spec.regression;
  const auto d = static_cast<std::size_t>(model.d);
  SamplePath path;
  path.n = n;
  path.dim = model.d;
  path.spec = spec;
  path.seed = seed;
  path.first.resize(n * d);
  path.second.resize(n);

  std::vector<double> column(n);
  for (std::size_t j = 0; j < d; ++j) {
    CounterRng rng(seed.master_seed, seed.replication_index, Stream::design,
                   static_cast<std::uint32_t>(j));
    if (spec.kind == ProcessKind::iid_regression) {
      for (auto& c : column) {
        c = model.design == DesignLaw::uniform01 ? rng.uniform() : rng.normal();
      }
    } else {
      detail::fill_unit_ar1(column, spec.ar_coef, rng);
      if (model.design == DesignLaw::uniform01) {
        for (auto& c : column) c = normal_cdf(c);
      }
    }
    for (std::size_t i = 0; i < n; ++i) path.first[i * d + j] = column[i];
  }
  CounterRng rng_y(seed.master_seed, seed.replication_index, Stream::response_noise);
  for (std::size_t i = 0; i < n; ++i) {
    const double noise = model.noise_sd > 0.0 ? model.noise_sd * rng_y.normal() : 0.0;
    path.second[i] = model.regression(path.x(i)) + noise;
  }
  return path;
}

/// Observed (C_i, Y_i = C_i X_i); X_i kept in `latent` for oracle checks only.
inline SamplePath simulate_censored(const ProcessSpec& spec, std::size_t n, SeedSpec seed) {
  if (spec.kind != ProcessKind::censored) throw invalid_spec("simulate_censored needs the censored kind");
  if (n < 1) throw invalid_spec("n must be >= 1");
  validate(spec);
  SamplePath path;
  path.n = n;
  path.spec = spec;
  path.seed = seed;
  path.first.resize(n);
  path.second.resize(n);
  path.latent.resize(n);
  CounterRng rng_x(seed.master_seed, seed.replication_index, Stream::u_latent);
  CounterRng rng_c(seed.master_seed, seed.replication_index, Stream::censoring);
  detail::fill_unit_ar1(path.latent, spec.ar_coef, rng_x);
  const double sd = std::sqrt(spec.gamma_x(0));
  const double pi = spec.censoring.keep_prob;
  for (std::size_t i = 0; i < n; ++i) {
    path.latent[i] *= sd;
    const double c = (pi >= 1.0 || rng_c.bernoulli(pi)) ? 1.0 : 0.0;
    path.first[i] = c;
    path.second[i] = c * path.latent[i];
  }
  return path;
}

inline SamplePath simulate(const ProcessSpec& spec, std::size_t n, SeedSpec seed) {
  if (is_pair_kind(spec.kind)) return simulate_pairs(spec, n, seed);
  if (is_regression_kind(spec.kind)) return simulate_regression(spec, n, seed);
  return simulate_censored(spec, n, seed);
}

// CSV columns: index,U,V | index,X[,X2..],Y | index,C,Y
inline void write_path_csv(std::ostream& os, const SamplePath& path) {
  if (is_pair_kind(path.spec.kind)) {
    os << "index,U,V\n";
  } else if (is_regression_kind(path.spec.kind)) {
    os << "index";
    if (path.dim == 1) {
      os << ",X";
    } else {
      for (int j = 0; j < path.dim; ++j) os << ",X" << (j + 1);
    }
    os << ",Y\n";
  } else {
    os << "index,C,Y\n";
  }
  const auto d = static_cast<std::size_t>(path.dim);
  for (std::size_t i = 0; i < path.n; ++i) {
    os << i;
    if (is_regression_kind(path.spec.kind)) {
      for (std::size_t j = 0; j < d; ++j) {
        os << ',';
        write_number(os, path.first[i * d + j]);
      }
    } else {
      os << ',';
      write_number(os, path.first[i]);
    }
    os << ',';
    write_number(os, path.second[i]);
    os << '\n';
  }
}

}  // namespace rml
