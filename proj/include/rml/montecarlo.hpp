#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rml/errors.hpp"
#include "rml/kernels.hpp"
#include "rml/moment_params.hpp"
#include "rml/numeric_oracle.hpp"
#include "rml/nw_regression.hpp"
#include "rml/parallel.hpp"
#include "rml/processes.hpp"
#include "rml/ratio.hpp"

namespace rml {

enum class Estimator { weighted_sum, nw_pointwise, nw_sup };
enum class BandwidthRule { pointwise, uniform, fixed };
enum class RegressionTarget { centered, truth };  // E g_hat / E f_hat, or r(x)
enum class Abscissa { n, n_over_log_n };

inline std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::weighted_sum: return "weighted_sum";
    case Estimator::nw_pointwise: return "nw_pointwise";
    case Estimator::nw_sup: return "nw_sup";
  }
  return "?";
}
inline std::string_view to_string(BandwidthRule b) {
  switch (b) {
    case BandwidthRule::pointwise: return "pointwise";
    case BandwidthRule::uniform: return "uniform";
    case BandwidthRule::fixed: return "fixed";
  }
  return "?";
}
inline std::string_view to_string(RegressionTarget t) {
  return t == RegressionTarget::centered ? "centered" : "truth";
}
inline std::string_view to_string(Abscissa a) { return a == Abscissa::n ? "n" : "n_over_log_n"; }

inline Estimator estimator_from_string(std::string_view s) {
  if (s == "weighted_sum") return Estimator::weighted_sum;
  if (s == "nw_pointwise") return Estimator::nw_pointwise;
  if (s == "nw_sup") return Estimator::nw_sup;
  throw invalid_spec("unknown estimator '" + std::string(s) + "'");
}
inline BandwidthRule bandwidth_rule_from_string(std::string_view s) {
  if (s == "pointwise") return BandwidthRule::pointwise;
  if (s == "uniform") return BandwidthRule::uniform;
  if (s == "fixed") return BandwidthRule::fixed;
  throw invalid_spec("unknown bandwidth rule '" + std::string(s) + "'");
}
inline RegressionTarget target_from_string(std::string_view s) {
  if (s == "centered") return RegressionTarget::centered;
  if (s == "truth") return RegressionTarget::truth;
  throw invalid_spec("unknown target '" + std::string(s) + "'");
}

// Slope tolerances from pilot runs on the shipped grids.
inline double default_tolerance(Estimator e, ProcessKind kind) {
  switch (e) {
    case Estimator::weighted_sum: return kind == ProcessKind::iid_pairs ? 0.08 : 0.10;
    case Estimator::nw_pointwise: return 0.08;
    case Estimator::nw_sup: return 0.12;
  }
  return 0.1;
}

struct ExperimentConfig {
  ProcessSpec process;
  Estimator estimator = Estimator::weighted_sum;
  double p = 2.0;
  std::vector<double> extra_p;  // further orders reported alongside p
  std::optional<MomentParams> params;
  std::vector<long long> n_grid;
  std::size_t M = 1000;
  std::uint64_t master_seed = 1;
  std::vector<double> x{0.5};  // evaluation point for nw_pointwise
  BandwidthRule bandwidth = BandwidthRule::pointwise;
  double bandwidth_c = 1.0;
  KernelName kernel = KernelName::epanechnikov;
  RegressionTarget target = RegressionTarget::centered;
  std::optional<double> tolerance;  // default_tolerance() when empty
  unsigned threads = 0;             // 0 = RML_THREADS / hardware

  [[nodiscard]] double slope_tolerance() const {
    return tolerance.value_or(default_tolerance(estimator, process.kind));
  }
  [[nodiscard]] unsigned worker_count() const { return threads ? threads : thread_count_from_env(); }
  [[nodiscard]] Setting setting() const {
    switch (estimator) {
      case Estimator::weighted_sum: return Setting::weighted_sum;
      case Estimator::nw_pointwise: return Setting::pointwise;
      case Estimator::nw_sup: return Setting::uniform;
    }
    return Setting::weighted_sum;
  }
  [[nodiscard]] Abscissa abscissa() const {
    return estimator == Estimator::nw_sup ? Abscissa::n_over_log_n : Abscissa::n;
  }

  // min_M = 100 for acceptance runs; unit tests may go lower.
  void validate(std::size_t min_M = 1) const {
    rml::validate(process);
    if (n_grid.size() < 3) throw invalid_spec("n_grid needs at least 3 sizes");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      if (n_grid[i] < 1) throw invalid_spec("n_grid entries must be >= 1");
      if (i && n_grid[i] <= n_grid[i - 1]) throw invalid_spec("n_grid must be strictly increasing");
    }
    if (M < std::max<std::size_t>(min_M, 1)) {
      throw invalid_spec("M = " + std::to_string(M) + " below the minimum " + std::to_string(min_M));
    }
    if (!(p > 0.0)) throw invalid_spec("p must be positive");
    for (double e : extra_p) {
      if (!(e > 0.0)) throw invalid_spec("extra p values must be positive");
    }
    const bool regression = estimator != Estimator::weighted_sum;
    if (regression != is_regression_kind(process.kind)) {
      throw invalid_spec("estimator " + std::string(to_string(estimator)) + " does not match process " +
                         std::string(to_string(process.kind)));
    }
    if (regression) {
      if (!(bandwidth_c > 0.0)) throw invalid_spec("bandwidth.C must be positive");
      if (estimator == Estimator::nw_pointwise &&
          static_cast<int>(x.size()) != process.regression.d) {
        throw invalid_spec("x must have d coordinates");
      }
      if (bandwidth == BandwidthRule::uniform && n_grid.front() < 3) {
        throw invalid_spec("uniform bandwidth needs n >= 3");
      }
    }
  }
};

/// ((1/M) sum |x_j|^p)^{1/p}, summed in index order.
inline double empirical_lp(std::span<const double> samples, double p) {
  if (samples.empty()) throw empty_sample("empirical_lp needs at least one sample");
  if (!(p > 0.0)) throw invalid_params("p must be positive");
  CompensatedSum s;
  for (double x : samples) s.add(std::pow(std::abs(x), p));
  return std::pow(s.value() / static_cast<double>(samples.size()), 1.0 / p);
}

// Delta-method standard error of empirical_lp: (1/p) m^{1/p - 1} se(m) with
// m the mean of |x|^p.
inline double empirical_lp_stderr(std::span<const double> samples, double p) {
  const std::size_t k = samples.size();
  if (k < 2) return 0.0;
  CompensatedSum s;
  for (double x : samples) s.add(std::pow(std::abs(x), p));
  const double m = s.value() / static_cast<double>(k);
  if (!(m > 0.0)) return 0.0;
  CompensatedSum ss;
  for (double x : samples) {
    const double d = std::pow(std::abs(x), p) - m;
    ss.add(d * d);
  }
  const double se_m = std::sqrt(ss.value() / static_cast<double>(k - 1) / static_cast<double>(k));
  return std::pow(m, 1.0 / p - 1.0) * se_m / p;
}

struct NormRow {
  long long n = 0;
  double p = 0.0;
  double norm = 0.0;
  double stderr_ = 0.0;
  std::size_t excluded = 0;
  std::size_t included = 0;
  double h_used = 0.0;  // 0 for weighted sums
};

struct NormTable {
  std::vector<NormRow> rows;  // grouped by n, orders in config order (p first)

  [[nodiscard]] std::vector<NormRow> for_p(double p) const {
    std::vector<NormRow> out;
    for (const auto& r : rows) {
      if (r.p == p) out.push_back(r);
    }
    return out;
  }
};

inline double bandwidth_for(const ExperimentConfig& cfg, long long n) {
  const auto& m = cfg.process.regression;
  switch (cfg.bandwidth) {
    case BandwidthRule::pointwise: return bandwidth_pointwise(n, m.rho, m.d, cfg.bandwidth_c);
    case BandwidthRule::uniform: return bandwidth_uniform(n, m.rho, m.d, cfg.bandwidth_c);
    case BandwidthRule::fixed: return cfg.bandwidth_c;
  }
  return cfg.bandwidth_c;
}

namespace detail {

inline double target_at(const ExperimentConfig& cfg, const Kernel& kernel, std::span<const double> x,
                        double h) {
  const auto& m = cfg.process.regression;
  // A constant r is its own centering; skipping the quotient keeps it exact.
  if (cfg.target == RegressionTarget::truth || m.response == ResponseKind::constant) return m.regression(x);
  const double f = expected_fhat(m, kernel, x, h);
  if (!(f > 0.0)) throw degenerate_denominator("E f_hat = 0 at an evaluation point");
  return expected_ghat(m, kernel, x, h) / f;
}

// Deviations for one sample size; nullopt marks an excluded replication.
inline std::vector<std::optional<double>> deviations_at(const ExperimentConfig& cfg, long long n,
                                                        double& h_used) {
  const auto nn = static_cast<std::size_t>(n);
  std::vector<std::optional<double>> out(cfg.M);
  const unsigned threads = cfg.worker_count();
  auto seed = [&](std::size_t j) { return SeedSpec{cfg.master_seed, static_cast<std::uint32_t>(j)}; };

  if (cfg.estimator == Estimator::weighted_sum) {
    h_used = 0.0;
    const double truth = cfg.process.ratio_truth();
    parallel_for(cfg.M, threads, [&](std::size_t j) {
      const auto path = simulate(cfg.process, nn, seed(j));
      RatioAccumulator acc;
      for (std::size_t i = 0; i < nn; ++i) acc.add(path.first[i], path.second[i]);
      if (const auto r = acc.ratio()) out[j] = *r - truth;
    });
    return out;
  }

  const auto& model = cfg.process.regression;
  const Kernel kernel = make_kernel(cfg.kernel, model.d);
  const double h = bandwidth_for(cfg, n);
  h_used = h;

  if (cfg.estimator == Estimator::nw_pointwise) {
    const double target = target_at(cfg, kernel, cfg.x, h);
    parallel_for(cfg.M, threads, [&](std::size_t j) {
      const auto path = simulate(cfg.process, nn, seed(j));
      if (const auto r = nw_estimate(cfg.x, path, kernel, h).r_hat) out[j] = *r - target;
    });
    return out;
  }

  const EvalGrid grid = make_grid(model.region, model.d, grid_mesh(h, nn, model.d));
  std::vector<double> targets(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) targets[k] = target_at(cfg, kernel, grid.point(k), h);
  parallel_for(cfg.M, threads, [&](std::size_t j) {
    const auto path = simulate(cfg.process, nn, seed(j));
    try {
      out[j] = sup_deviation(grid, NwEvaluator(path, kernel), h, targets).sup_err;
    } catch (const all_excluded&) {
      out[j].reset();
    }
  });
  return out;
}

}  // namespace detail

struct DeviationSample {
  long long n = 0;
  std::vector<double> values;  // included replications, index order
  std::size_t excluded = 0;
  double h_used = 0.0;
};

// Raw per-replication deviations at one sample size, without the exclusion cap.
inline DeviationSample simulate_deviations(const ExperimentConfig& cfg, long long n) {
  DeviationSample out;
  out.n = n;
  const auto devs = detail::deviations_at(cfg, n, out.h_used);
  out.values.reserve(devs.size());
  for (const auto& d : devs) {
    if (d) out.values.push_back(*d);
  }
  out.excluded = devs.size() - out.values.size();
  return out;
}

inline void check_exclusions(std::size_t excluded, std::size_t M, long long n) {
  if (static_cast<double>(excluded) > 0.01 * static_cast<double>(M) || excluded == M) {
    throw too_many_exclusions(std::to_string(excluded) + " of " + std::to_string(M) +
                              " replications degenerate at n = " + std::to_string(n));
  }
}

/// Monte Carlo L^p norms of the deviation over the n grid. Replication j
/// always uses seed (master_seed, j); aggregation runs in index order, so the
/// table does not depend on the thread count.
inline NormTable replicate(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<double> orders{cfg.p};
  for (double e : cfg.extra_p) {
    if (std::find(orders.begin(), orders.end(), e) == orders.end()) orders.push_back(e);
  }
  NormTable table;
  for (long long n : cfg.n_grid) {
    const auto sample = simulate_deviations(cfg, n);
    check_exclusions(sample.excluded, cfg.M, n);
    const auto& kept = sample.values;
    const std::size_t excluded = sample.excluded;
    const double h = sample.h_used;
    std::vector<std::pair<double, double>> by_order;
    for (double q : orders) {
      NormRow row;
      row.n = n;
      row.p = q;
      row.norm = empirical_lp(kept, q);
      row.stderr_ = empirical_lp_stderr(kept, q);
      row.excluded = excluded;
      row.included = kept.size();
      row.h_used = h;
      by_order.emplace_back(q, row.norm);
      table.rows.push_back(row);
    }
    // Power-mean inequality, up to rounding.
    std::sort(by_order.begin(), by_order.end());
    for (std::size_t k = 1; k < by_order.size(); ++k) {
      if (by_order[k].second < by_order[k - 1].second * (1.0 - 1e-12)) {
        throw std::logic_error("empirical L^p norms not monotone in p at n = " + std::to_string(n));
      }
    }
  }
  return table;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double rss = 0.0;
};

// Ordinary least squares of y on x (already on the log scale).
inline LineFit ols_loglog(std::span<const double> lx, std::span<const double> ly) {
  if (lx.size() != ly.size() || lx.size() < 3) throw degenerate_fit("fit needs at least 3 points");
  const double k = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw degenerate_fit("abscissa values coincide");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - f.intercept - f.slope * lx[i];
    f.rss += e * e;
  }
  f.slope_stderr = std::sqrt(f.rss / (k - 2.0) / sxx);
  return f;
}

struct RatePoint {
  long long n = 0;
  double abscissa = 0.0;
  double norm = 0.0;
  double stderr_ = 0.0;
  std::size_t excluded = 0;
};

struct RateFit {
  Abscissa abscissa = Abscissa::n;
  std::vector<RatePoint> points;
  double slope = 0.0;
  double slope_stderr = 0.0;
  double intercept = 0.0;
  double rss = 0.0;
  double theoretical = 0.0;  // positive exponent; the expected slope is -theoretical
  double tolerance = 0.0;
  bool pass = false;
};

/// OLS of log(norm) on log(abscissa); pass iff |slope + theoretical| <= tolerance.
inline RateFit fit_rate(const std::vector<NormRow>& rows, Abscissa abscissa, double theoretical,
                        double tolerance) {
  if (rows.size() < 3) throw degenerate_fit("rate fit needs at least 3 sizes");
  RateFit fit;
  fit.abscissa = abscissa;
  fit.theoretical = theoretical;
  fit.tolerance = tolerance;
  std::vector<double> lx, ly;
  for (const auto& r : rows) {
    if (!(r.norm > 0.0)) throw degenerate_fit("norm is 0 at n = " + std::to_string(r.n));
    const double nn = static_cast<double>(r.n);
    double a = nn;
    if (abscissa == Abscissa::n_over_log_n) {
      if (r.n < 3) throw degenerate_fit("n / log n abscissa needs n >= 3");
      a = nn / std::log(nn);
    }
    fit.points.push_back({r.n, a, r.norm, r.stderr_, r.excluded});
    lx.push_back(std::log(a));
    ly.push_back(std::log(r.norm));
  }
  const auto ols = ols_loglog(lx, ly);
  fit.slope = ols.slope;
  fit.slope_stderr = ols.slope_stderr;
  fit.intercept = ols.intercept;
  fit.rss = ols.rss;
  fit.pass = std::abs(fit.slope + theoretical) <= tolerance;
  return fit;
}

inline RateFit fit_rate(const ExperimentConfig& cfg, const NormTable& table) {
  const auto& m = cfg.process.regression;
  return fit_rate(table.for_p(cfg.p), cfg.abscissa(), theoretical_exponent(cfg.setting(), m.rho, m.d),
                  cfg.slope_tolerance());
}

struct CltCheck {
  long long n = 0;
  double p_prime = 0.0;
  double lhs = 0.0;     // sqrt(n) * empirical ||Delta_n||_{p'}
  double lhs_stderr = 0.0;
  double limit = 0.0;   // ||Z||_{p'}, Z ~ N(0, sigma^2)
  double sigma = 0.0;
  double relative_gap = 0.0;
  std::size_t excluded = 0;
};

/// Normalized deviation norm at the largest n against its Gaussian limit.
inline CltCheck clt_check(const ExperimentConfig& cfg, double p_prime) {
  if (cfg.process.kind != ProcessKind::iid_pairs || cfg.estimator != Estimator::weighted_sum) {
    throw invalid_spec("CLT check needs an i.i.d. weighted-sum config");
  }
  if (!(p_prime > 0.0 && p_prime < cfg.p)) throw invalid_params("need 0 < p' < p");
  ExperimentConfig one = cfg;
  one.p = p_prime;
  one.extra_p.clear();
  const long long n = cfg.n_grid.back();
  one.n_grid = {n};
  cfg.validate();
  const auto sample = simulate_deviations(one, n);
  check_exclusions(sample.excluded, cfg.M, n);
  const auto& kept = sample.values;
  CltCheck c;
  c.n = n;
  c.p_prime = p_prime;
  c.excluded = sample.excluded;
  const double root_n = std::sqrt(static_cast<double>(n));
  c.lhs = root_n * empirical_lp(kept, p_prime);
  c.lhs_stderr = root_n * empirical_lp_stderr(kept, p_prime);
  c.sigma = std::sqrt(delta_method_variance(cfg.process));
  c.limit = c.sigma * std::pow(normal_abs_moment(p_prime), 1.0 / p_prime);
  c.relative_gap = std::abs(c.lhs - c.limit) / c.limit;
  return c;
}

struct BiasSweep {
  std::vector<double> h;
  std::vector<double> bias;
  bool exact_zero = false;  // every bias is exactly 0; no slope is fitted
  double slope = 0.0;
  double slope_stderr = 0.0;
};

/// Quadrature bias at h = h_max 2^{-j}, j = 0..levels-1, with the log-log
/// slope against h.
inline BiasSweep bias_sweep(const RegressionModel& model, const Kernel& kernel, std::span<const double> x,
                            double h_max, int levels, const QuadratureSpec& qs = {}) {
  if (!(h_max > 0.0) || levels < 3) throw invalid_params("bias sweep needs h_max > 0 and >= 3 levels");
  BiasSweep out;
  std::size_t zeros = 0;
  for (int j = 0; j < levels; ++j) {
    const double h = h_max * std::ldexp(1.0, -j);
    out.h.push_back(h);
    out.bias.push_back(bias_at(model, kernel, x, h, qs));
    if (out.bias.back() == 0.0) ++zeros;
  }
  if (zeros == out.bias.size()) {
    out.exact_zero = true;
    return out;
  }
  if (zeros) throw degenerate_fit("bias vanishes at some but not all bandwidths");
  std::vector<double> lx, ly;
  for (std::size_t j = 0; j < out.h.size(); ++j) {
    lx.push_back(std::log(out.h[j]));
    ly.push_back(std::log(out.bias[j]));
  }
  const auto f = ols_loglog(lx, ly);
  out.slope = f.slope;
  out.slope_stderr = f.slope_stderr;
  return out;
}

}  // namespace rml
