#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rml/errors.hpp"

namespace rml {

// Slack applied to non-strict inequalities between derived exponents.
inline constexpr double exponent_margin = 1e-12;

namespace detail {

inline std::string fmt_num(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

inline bool geq_with_margin(double lhs, double rhs) {
  return lhs >= rhs - exponent_margin * std::max(1.0, std::abs(rhs));
}

inline bool leq_with_margin(double lhs, double rhs) {
  return geq_with_margin(rhs, lhs);
}

}  // namespace detail

// Raw moment orders (p, q, r, s) without the feasibility checks of validate_params.
// p: target moment, q: denominator moment, r: moment of U*V, s: moment of V.
struct Exponents {
  double p = 0.0;
  double q = 0.0;
  double r = 0.0;
  double s = 0.0;

  [[nodiscard]] double alpha() const { return q * (1.0 / p - 1.0 / s - 1.0 / q); }
  [[nodiscard]] double beta() const { return p * r / (q * (r - p)); }
};

// Validated exponent set satisfying every hypothesis of the ratio moment
// bound; only constructible through validate_params().
class MomentParams {
public:
  [[nodiscard]] double p() const { return e_.p; }
  [[nodiscard]] double q() const { return e_.q; }
  [[nodiscard]] double r() const { return e_.r; }
  [[nodiscard]] double s() const { return e_.s; }
  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] double beta() const { return beta_; }
  [[nodiscard]] const Exponents& exponents() const { return e_; }

private:
  MomentParams(Exponents e, double alpha, double beta)
      : e_(e), alpha_(alpha), beta_(beta) {}
  friend MomentParams validate_params(double, double, double, double);

  Exponents e_;
  double alpha_;
  double beta_;
};

/// Checks q > p, q/p - q/r >= 1, 1/p > 1/q + 1/s and computes
/// alpha = q(1/p - 1/s - 1/q), beta = pr / (q(r - p)), both required in (0, 1].
/// Throws invalid_params naming the first violated inequality.
inline MomentParams validate_params(double p, double q, double r, double s) {
  using detail::fmt_num;
  if (!(p > 0.0 && q > 0.0 && r > 0.0 && s > 0.0) || !std::isfinite(p) ||
      !std::isfinite(q) || !std::isfinite(r) || !std::isfinite(s)) {
    throw invalid_params("p, q, r, s must be positive and finite");
  }
  if (!(q > p)) throw invalid_params("q > p required");
  if (!(r > p)) throw invalid_params("r > p required (beta undefined otherwise)");
  const double hoelder = q / p - q / r;
  if (!detail::geq_with_margin(hoelder, 1.0)) {
    throw invalid_params("q/p - q/r >= 1 required (got " + fmt_num(hoelder) + ")");
  }
  if (!(1.0 / p > 1.0 / q + 1.0 / s)) {
    throw invalid_params("1/p > 1/q + 1/s required");
  }
  const Exponents e{p, q, r, s};
  const double alpha = e.alpha();
  const double beta = e.beta();
  if (!(alpha > 0.0) || !detail::leq_with_margin(alpha, 1.0)) {
    throw invalid_params("0 < alpha <= 1 required (alpha = " + fmt_num(alpha) + ")");
  }
  if (!(beta > 0.0) || !detail::leq_with_margin(beta, 1.0)) {
    throw invalid_params("0 < beta <= 1 required (beta = " + fmt_num(beta) + ")");
  }
  return MomentParams(e, alpha, beta);
}

struct RatioExponents {
  double r;
  double s;
};

// Orders that make beta = 1 and alpha = 2/s for the n^{-1/2} weighted-sum rate.
inline RatioExponents thm1_exponents(double p, double q) {
  if (!(p > 0.0) || !(q > p) || !std::isfinite(q)) {
    throw invalid_params("q > p > 0 required");
  }
  return {p * q / (q - p), p * (q + 2.0) / (q - p)};
}

struct BoundInputs {
  double numerator_mean = 0.0;    // N_n
  double denominator_mean = 1.0;  // D_n
  double rate = 0.0;              // v_n
  double uv_moment_bound = 0.0;   // C_n >= ||U V||_r
  double v_moment_bound = 0.0;    // c_n >= ||V||_s
  long long n = 1;
};

/// Upper bound on ||R_hat - R_n||_p:
///   (1 + |N|/D + |N|^b v^{1-b}/D + C^b v^{1-b}/D + v^a c n^{1/s}/D^a) v / D.
inline double lemma1_bound(const MomentParams& params, const BoundInputs& in) {
  if (!(in.denominator_mean > 0.0)) {
    throw degenerate_denominator("D_n must be positive");
  }
  if (!(in.rate >= 0.0) || !(in.uv_moment_bound >= 0.0) ||
      !(in.v_moment_bound >= 0.0) || in.n < 1) {
    throw invalid_params("v_n, C_n, c_n must be nonnegative and n >= 1");
  }
  if (in.rate == 0.0) return 0.0;
  const double a = params.alpha();
  const double b = params.beta();
  const double d = in.denominator_mean;
  const double abs_n = std::abs(in.numerator_mean);
  const double v = in.rate;
  const double factor = 1.0 + abs_n / d + std::pow(abs_n, b) * std::pow(v, 1.0 - b) / d +
                        std::pow(in.uv_moment_bound, b) * std::pow(v, 1.0 - b) / d +
                        std::pow(v, a) * in.v_moment_bound *
                            std::pow(static_cast<double>(in.n), 1.0 / params.s()) /
                            std::pow(d, a);
  return factor * v / d;
}

struct FeasibilityReport {
  bool feasible = false;
  double threshold = 0.0;  // max of the two branches
  double rate_branch = 0.0;
  double moment_branch = 0.0;
  std::string diagnostic;
};

/// Window-width feasibility for the pointwise regression rate:
/// pd(r-1)/(qr-pq-pr) v pd/(qs-pq-ps-2p) <= rho.
inline FeasibilityReport regression_feasible(const Exponents& e, int d, double rho) {
  if (d < 1 || !(rho > 0.0)) throw invalid_params("d >= 1 and rho > 0 required");
  if (!(e.p > 0.0 && e.q > e.p && e.r > 0.0 && e.s > 0.0)) {
    throw invalid_params("q > p > 0 and r, s > 0 required");
  }
  const double p = e.p, q = e.q, r = e.r, s = e.s;
  const double den1 = q * r - p * q - p * r;
  const double den2 = q * s - p * q - p * s - 2.0 * p;
  if (!(den1 > 0.0)) {
    throw invalid_params("qr - pq - pr must be positive (got " + detail::fmt_num(den1) + ")");
  }
  if (!(den2 > 0.0)) {
    throw invalid_params("qs - pq - ps - 2p must be positive (got " +
                         detail::fmt_num(den2) + ")");
  }
  FeasibilityReport rep;
  rep.rate_branch = p * d * (r - 1.0) / den1;
  rep.moment_branch = p * d / den2;
  rep.threshold = std::max(rep.rate_branch, rep.moment_branch);
  rep.feasible = rep.threshold <= rho;
  rep.diagnostic = rep.feasible ? "threshold " + detail::fmt_num(rep.threshold) + " <= rho"
                                : "rho = " + detail::fmt_num(rho) + " below threshold " +
                                      detail::fmt_num(rep.threshold);
  return rep;
}

inline double bandwidth_pointwise(long long n, double rho, int d, double c) {
  if (n < 1 || !(rho > 0.0) || d < 1 || !(c > 0.0)) {
    throw invalid_params("bandwidth needs n >= 1, rho > 0, d >= 1, C > 0");
  }
  return c * std::pow(static_cast<double>(n), -1.0 / (2.0 * rho + d));
}

inline double bandwidth_uniform(long long n, double rho, int d, double c) {
  if (n < 3 || !(rho > 0.0) || d < 1 || !(c > 0.0)) {
    throw invalid_params("uniform bandwidth needs n >= 3, rho > 0, d >= 1, C > 0");
  }
  const double nn = static_cast<double>(n);
  return c * std::pow(std::log(nn) / nn, 1.0 / (2.0 * rho + d));
}

enum class Setting { weighted_sum, pointwise, uniform };

inline std::string_view to_string(Setting s) {
  switch (s) {
    case Setting::weighted_sum: return "weighted_sum";
    case Setting::pointwise: return "pointwise";
    case Setting::uniform: return "uniform";
  }
  return "?";
}

// Positive rate exponent: the deviation norm decays like abscissa^{-exponent}.
inline double theoretical_exponent(Setting setting, double rho, int d) {
  if (setting == Setting::weighted_sum) return 0.5;
  return rho / (2.0 * rho + d);
}

enum class DependenceKind { iid, strong_mixing, absolute_regularity, causal_gamma, lambda_weak };

inline std::string_view to_string(DependenceKind k) {
  switch (k) {
    case DependenceKind::iid: return "iid";
    case DependenceKind::strong_mixing: return "strong_mixing";
    case DependenceKind::absolute_regularity: return "absolute_regularity";
    case DependenceKind::causal_gamma: return "causal_gamma";
    case DependenceKind::lambda_weak: return "lambda_weak";
  }
  return "?";
}

// Several results state two alternative sets of sufficient conditions.
enum class ConditionSet { first, second };

struct DependenceSpec {
  DependenceKind kind = DependenceKind::iid;
  double decay_exponent = 0.0;  // polynomial (or exponential, lambda-weak uniform) rate
  std::optional<double> aux_exponent;
  ConditionSet variant = ConditionSet::first;
};

enum class Proposition {
  iid_weighted_sum,
  mixing_weighted_sum,        // strong mixing, weighted sums
  causal_weighted_sum,        // gamma-dependence, U independent of V
  lambda_weighted_sum_indep,  // lambda-weak, U independent of V, U bounded
  lambda_weighted_sum_moment, // lambda-weak, ||U||_{r'} bounded
  iid_pointwise,
  lambda_pointwise,
  mixing_pointwise_first,
  mixing_pointwise_second,
  iid_uniform,
  regular_uniform,            // absolute regularity
  mixing_uniform,
  lambda_uniform,             // exponential lambda decay
};

inline std::string_view to_string(Proposition p) {
  switch (p) {
    case Proposition::iid_weighted_sum: return "thm1_iid";
    case Proposition::mixing_weighted_sum: return "prop1";
    case Proposition::causal_weighted_sum: return "prop2";
    case Proposition::lambda_weighted_sum_indep: return "prop3_independent";
    case Proposition::lambda_weighted_sum_moment: return "prop3_moment";
    case Proposition::iid_pointwise: return "prop6";
    case Proposition::lambda_pointwise: return "prop7";
    case Proposition::mixing_pointwise_first: return "prop8_first";
    case Proposition::mixing_pointwise_second: return "prop8_second";
    case Proposition::iid_uniform: return "prop11";
    case Proposition::regular_uniform: return "prop12";
    case Proposition::mixing_uniform: return "prop13";
    case Proposition::lambda_uniform: return "prop14";
  }
  return "?";
}

struct HypothesisReport {
  Proposition proposition = Proposition::iid_weighted_sum;
  double threshold = 0.0;
  double supplied = 0.0;
  bool satisfied = false;  // supplied > threshold, strictly
  std::vector<std::string> warnings;
  // Upper bound on a*d for h ~ n^{-a}; only for the first mixing/pointwise set.
  std::optional<double> window_bound;
  std::optional<double> window_value;
};

// Threshold on lambda for non-integer q in (2, 3) with a q' = q + delta moment.
inline double noninteger_moment_lambda_threshold(double q_prime) {
  return 4.0 + 2.0 / q_prime;
}

namespace detail {

inline double checked_ratio(double num, double den, std::string_view what) {
  if (!(den > 0.0)) {
    throw invalid_params(std::string(what) + " denominator must be positive (got " +
                         fmt_num(den) + ")");
  }
  return num / den;
}

inline bool is_even_integer(double x) {
  return x == std::floor(x) && std::fmod(x, 2.0) == 0.0;
}

inline double require_aux(const DependenceSpec& dep, std::string_view name) {
  if (!dep.aux_exponent) {
    throw invalid_params(std::string(name) + " requires aux_exponent");
  }
  return *dep.aux_exponent;
}

inline void regression_side_conditions(HypothesisReport& rep, const Exponents& e, int d,
                                       double rho) {
  if (!(e.s > 2.0 * e.p)) rep.warnings.push_back("hypothesis s > 2p fails");
  else if (!(rho > d * e.p / (e.s - 2.0 * e.p)))
    rep.warnings.push_back("hypothesis rho > dp/(s-2p) fails");
}

}  // namespace detail

/// Selects the result covering (dep.kind, setting), evaluates its decay
/// threshold verbatim and compares it strictly with dep.decay_exponent.
/// Side hypotheses that do not involve the decay rate are reported as
/// warnings; a formula whose denominator is nonpositive is invalid_params.
inline HypothesisReport check_dependence(const DependenceSpec& dep, const Exponents& e,
                                         Setting setting, int d, double rho) {
  using detail::checked_ratio;
  const double p = e.p, q = e.q, r = e.r, s = e.s;
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (dep.kind != DependenceKind::iid && !(dep.decay_exponent > 0.0)) {
    throw invalid_params("decay_exponent > 0 required for dependent kinds");
  }
  HypothesisReport rep;
  rep.supplied = dep.decay_exponent;

  const auto unsupported = [&] {
    return unsupported_combination(std::string(to_string(dep.kind)) + " with " +
                                   std::string(to_string(setting)));
  };

  switch (setting) {
    case Setting::weighted_sum:
      switch (dep.kind) {
        case DependenceKind::iid:
          rep.proposition = Proposition::iid_weighted_sum;
          rep.threshold = 0.0;
          rep.supplied = inf;
          break;
        case DependenceKind::strong_mixing: {
          rep.proposition = Proposition::mixing_weighted_sum;
          const double rp = detail::require_aux(dep, "prop1");
          rep.threshold = std::max(0.5 * p * checked_ratio(r, r - p, "r/(r-p)"),
                                   0.5 * q * checked_ratio(rp, rp - q, "r'/(r'-q)"));
          if (!(s >= rp && rp > q)) rep.warnings.push_back("hypothesis s >= r' > q fails");
          break;
        }
        case DependenceKind::causal_gamma:
          rep.proposition = Proposition::causal_weighted_sum;
          rep.threshold =
              std::max(0.5 * p * checked_ratio(s - 1.0, s - p, "(s-1)/(s-p)"), 0.5 * q);
          break;
        case DependenceKind::lambda_weak:
          if (dep.variant == ConditionSet::first) {
            rep.proposition = Proposition::lambda_weighted_sum_indep;
            rep.threshold = 0.5 * q;
          } else {
            rep.proposition = Proposition::lambda_weighted_sum_moment;
            const double rp = detail::require_aux(dep, "prop3");
            rep.threshold = checked_ratio(rp, rp - 2.0, "r'/(r'-2)") * 0.5 * q;
            if (rp > s) rep.warnings.push_back("hypothesis r' <= s fails");
          }
          if (!detail::is_even_integer(p) || !detail::is_even_integer(q)) {
            rep.warnings.push_back("p and q should be even integers");
          }
          break;
        default:
          throw unsupported();
      }
      break;

    case Setting::pointwise:
      switch (dep.kind) {
        case DependenceKind::iid:
          rep.proposition = Proposition::iid_pointwise;
          rep.threshold = 0.0;
          rep.supplied = inf;
          if (r != q) rep.warnings.push_back("moment condition stated with r = q");
          break;
        case DependenceKind::lambda_weak: {
          rep.proposition = Proposition::lambda_pointwise;
          if (!(s > 2.0 * p)) throw invalid_params("prop7 requires s > 2p");
          const double first =
              checked_ratio(r * (2.0 * r * (s - p) + 2.0 * p - s),
                            (r - p) * (s - 2.0 * p) * (r - 1.0), "prop7 first branch") *
              (p - 1.0);
          const double second = 2.0 * (d - 1.0) / d * (q - 1.0);
          rep.threshold = std::max(first, second);
          break;
        }
        case DependenceKind::strong_mixing:
          if (dep.variant == ConditionSet::first) {
            rep.proposition = Proposition::mixing_pointwise_first;
            rep.threshold = std::max(
                (q - 1.0) * checked_ratio(r, r - q, "r/(r-q)"),
                checked_ratio(4.0 * s * r - 2.0 * s - 4.0 * r, (r - 2.0) * (s - 4.0),
                              "(r-2)(s-4)"));
            rep.window_bound = (1.0 - 2.0 / p) / (3.0 - 2.0 / r);
            rep.window_value = d / (2.0 * rho + d);
            if (*rep.window_value > *rep.window_bound) {
              rep.warnings.push_back("window constraint a*d <= (1-2/p)/(3-2/r) fails for "
                                     "h ~ n^{-1/(2rho+d)}");
            }
          } else {
            rep.proposition = Proposition::mixing_pointwise_second;
            rep.threshold = 0.5 * r * checked_ratio(s - 2.0 * p, s - p, "(s-2p)/(s-p)") *
                            (1.0 - 1.0 / p);
            if (!detail::is_even_integer(p) || !detail::is_even_integer(q)) {
              rep.warnings.push_back("p and q should be even integers");
            }
          }
          break;
        default:
          throw unsupported();
      }
      break;

    case Setting::uniform:
      switch (dep.kind) {
        case DependenceKind::iid:
          rep.proposition = Proposition::iid_uniform;
          // The only requirement is on the regularity: rho > dp/(s-2p).
          rep.threshold = checked_ratio(d * p, s - 2.0 * p, "s-2p");
          rep.supplied = rho;
          break;
        case DependenceKind::absolute_regularity:
          rep.proposition = Proposition::regular_uniform;
          rep.threshold = std::max(
              checked_ratio(s * rho + (2.0 * s - p) * d, rho * (s - 2.0 * p) - p * d,
                            "rho(s-2p)-pd"),
              1.0 + 2.0 * d / rho);
          detail::regression_side_conditions(rep, e, d, rho);
          break;
        case DependenceKind::strong_mixing: {
          rep.proposition = Proposition::mixing_uniform;
          const double num = 3.0 * rho * s + 2.0 * d * s + d * rho * s - 4.0 * rho * p -
                             3.0 * d * p - d * rho * p;
          const double den = d * p - rho * (s - 2.0 * p);
          if (den == 0.0) throw invalid_params("prop13 denominator dp - rho(s-2p) is zero");
          if (!(s > 2.0)) throw invalid_params("prop13 requires s > 2");
          rep.threshold = std::max(num / den, 2.0 * (s - 1.0) / (s - 2.0));
          // rho > dp/(s-2p) forces den < 0, which flips the first branch negative.
          if (den < 0.0) {
            rep.warnings.push_back("sign conflict: first-branch denominator dp - rho(s-2p) = " +
                                   detail::fmt_num(den) +
                                   " is negative under the hypothesis rho > dp/(s-2p)");
          }
          detail::regression_side_conditions(rep, e, d, rho);
          break;
        }
        case DependenceKind::lambda_weak: {
          rep.proposition = Proposition::lambda_uniform;
          const double b = detail::require_aux(dep, "prop14 (shape b)");
          if (!(b > 0.0)) throw invalid_params("prop14 requires b > 0");
          rep.threshold = 0.0;
          detail::regression_side_conditions(rep, e, d, rho);
          break;
        }
        default:
          throw unsupported();
      }
      break;
  }

  rep.satisfied = rep.supplied > rep.threshold;
  if (std::isfinite(rep.supplied) &&
      std::abs(rep.supplied - rep.threshold) <=
          exponent_margin * std::max(1.0, std::abs(rep.threshold))) {
    rep.warnings.push_back("boundary case: supplied equals threshold");
  }
  return rep;
}

}  // namespace rml
