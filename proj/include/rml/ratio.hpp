#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "rml/errors.hpp"

namespace rml {

// Neumaier compensated summation. Adding an exact zero is a no-op, so sums
// that skip zero terms equal sums over the full index range.
class CompensatedSum {
public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Streaming form of the ratio estimator: accumulates sum U_i and sum U_i V_i
// and tracks the extremes of V over the indices with U_i > 0.
class RatioAccumulator {
public:
  void add(double u, double v) {
    ++count_;
    if (u == 0.0) return;
    den_.add(u);
    num_.add(u * v);
    v_min_ = std::min(v_min_, v);
    v_max_ = std::max(v_max_, v);
  }

  [[nodiscard]] std::size_t count() const { return count_; }
  [[nodiscard]] double sum_u() const { return den_.value(); }
  [[nodiscard]] double sum_uv() const { return num_.value(); }

  // Convex combination of the V_i; clamped to their hull to absorb rounding.
  [[nodiscard]] std::optional<double> ratio() const {
    const double den = sum_u();
    if (!(den > 0.0)) return std::nullopt;
    return std::clamp(sum_uv() / den, v_min_, v_max_);
  }

private:
  CompensatedSum den_;
  CompensatedSum num_;
  double v_min_ = std::numeric_limits<double>::infinity();
  double v_max_ = -std::numeric_limits<double>::infinity();
  std::size_t count_ = 0;
};

struct RatioStats {
  double D_hat = 0.0;             // (1/n) sum U_i
  double N_hat = 0.0;             // (1/n) sum U_i V_i
  std::optional<double> R_hat;    // empty when sum U_i = 0
  std::vector<double> weights;    // U_i / sum_j U_j, empty when R_hat is undefined
  std::size_t n = 0;

  [[nodiscard]] bool degenerate() const { return !R_hat.has_value(); }
};

/// D_hat, N_hat and R_hat = N_hat / D_hat with its convex weights.
/// An all-zero U yields a degenerate (flagged) result, not an exception.
inline RatioStats ratio_estimate(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size() || u.empty()) {
    throw invalid_params("ratio_estimate needs equal nonempty U and V");
  }
  RatioAccumulator acc;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] >= 0.0)) throw invalid_params("U_i must be nonnegative");
    acc.add(u[i], v[i]);
  }
  RatioStats st;
  st.n = u.size();
  const double n = static_cast<double>(st.n);
  st.D_hat = acc.sum_u() / n;
  st.N_hat = acc.sum_uv() / n;
  st.R_hat = acc.ratio();
  if (st.R_hat) {
    const double total = acc.sum_u();
    st.weights.resize(st.n);
    for (std::size_t i = 0; i < st.n; ++i) st.weights[i] = u[i] / total;
  }
  return st;
}

// Delta_n = R_hat - R_n.
inline double deviation(const RatioStats& stats, double target) {
  if (!stats.R_hat) throw degenerate_denominator("R_hat undefined (sum U = 0)");
  return *stats.R_hat - target;
}

struct Lemma2Audit {
  double lhs = 0.0;  // D_n |R_hat - N_n / D_n|
  double rhs = 0.0;
  double slack = 0.0;
  double alpha_used = 0.0;

  [[nodiscard]] double relative_slack() const { return slack / std::max(1.0, rhs); }
};

/// Deterministic bound
///   D_n |Delta_n| <= |N_hat - N_n| + |N_hat|/D_n |D_hat - D_n|
///                    + max_i |V_i| |D_hat - D_n|^{1+alpha} / D_n^alpha,
/// evaluated on one realization. Requires D_hat > 0.
inline Lemma2Audit lemma2_audit(std::span<const double> u, std::span<const double> v,
                                double numerator_mean, double denominator_mean, double alpha) {
  if (!(denominator_mean > 0.0)) throw degenerate_denominator("D_n must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw invalid_params("alpha must lie in (0, 1)");
  const RatioStats st = ratio_estimate(u, v);
  if (!st.R_hat) throw degenerate_denominator("D_hat = 0, audit skipped");
  double v_max = 0.0;
  for (double x : v) v_max = std::max(v_max, std::abs(x));
  const double dn = denominator_mean;
  const double gap = std::abs(st.D_hat - dn);
  Lemma2Audit a;
  a.alpha_used = alpha;
  a.lhs = dn * std::abs(*st.R_hat - numerator_mean / dn);
  a.rhs = std::abs(st.N_hat - numerator_mean) + std::abs(st.N_hat) / dn * gap +
          v_max * std::pow(gap, 1.0 + alpha) / std::pow(dn, alpha);
  a.slack = a.rhs - a.lhs;
  return a;
}

// N_hat/D_n * 1/(1 - z) - N_n/D_n with z = (D_n - D_hat)/D_n; algebraically
// equal to R_hat - N_n/D_n whenever D_hat != 0.
inline double ratio_expansion(double n_hat, double d_hat, double numerator_mean,
                              double denominator_mean) {
  const double z = (denominator_mean - d_hat) / denominator_mean;
  return n_hat / denominator_mean * (1.0 / (1.0 - z)) - numerator_mean / denominator_mean;
}

struct PisierCheck {
  double lhs = 0.0;  // max_i |V_i|^e
  double rhs = 0.0;  // sum_i |V_i|^e
  [[nodiscard]] bool holds() const { return lhs <= rhs; }
};

inline PisierCheck pisier_check(std::span<const double> v, double e) {
  if (v.empty()) throw invalid_params("pisier_check needs a nonempty sequence");
  if (!(e > 0.0)) throw invalid_params("exponent must be positive");
  PisierCheck c;
  // Plain summation: rounding is monotone, so each partial sum of
  // nonnegative terms dominates every term already added.
  for (double x : v) {
    const double t = std::pow(std::abs(x), e);
    c.lhs = std::max(c.lhs, t);
    c.rhs += t;
  }
  return c;
}

}  // namespace rml
