#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "rml/laws.hpp"
#include "rml/parallel.hpp"
#include "rml/ratio.hpp"
#include "rml/rng.hpp"

namespace rml {

struct AuditSummary {
  std::size_t trials = 0;
  std::size_t evaluated = 0;
  std::size_t excluded = 0;   // realizations with D_hat = 0
  std::size_t violations = 0;
  double min_relative_slack = std::numeric_limits<double>::infinity();
  std::optional<std::uint32_t> first_offending_trial;

  [[nodiscard]] bool passed() const { return violations == 0; }
};

struct Lemma2Instance {
  std::vector<double> u;
  std::vector<double> v;
  double numerator_mean = 0.0;
  double denominator_mean = 1.0;
  double alpha = 0.5;
};

struct Lemma2AuditOptions {
  std::size_t trials = 100000;
  std::uint64_t seed = 20090901;
  std::vector<double> alphas{0.1, 0.5, 0.9};
  std::size_t max_n = 50;
  double tolerance = 1e-12;  // on slack / max(1, rhs)
  unsigned threads = 1;
};

// Randomized instance number `trial`: n in {1..max_n}, U from an
// exponential/uniform/atom-at-zero law, V Gaussian or Student t(2),
// and (N_n, D_n) either the population values or arbitrary perturbations.
inline Lemma2Instance make_lemma2_instance(const Lemma2AuditOptions& opt, std::uint32_t trial) {
  CounterRng rng(opt.seed, trial, Stream::generic);
  Lemma2Instance inst;
  const auto n = 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(opt.max_n));
  inst.alpha = opt.alphas[trial % opt.alphas.size()];
  const bool heavy = (trial / opt.alphas.size()) % 2 == 1;
  const std::array<MarginalLaw, 3> u_laws{MarginalLaw::exponential(1.0), MarginalLaw::uniform(0.0, 2.0),
                                          MarginalLaw::discrete({0.0, 1.0, 2.0}, {0.3, 0.4, 0.3})};
  const MarginalLaw& law = u_laws[(trial / 7) % u_laws.size()];
  const double v_loc = 4.0 * (rng.uniform() - 0.5);
  const double v_scale = std::exp(2.0 * (rng.uniform() - 0.5));
  inst.u.resize(n);
  inst.v.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    inst.u[i] = law.sample(rng);
    inst.v[i] = v_loc + v_scale * (heavy ? rng.student_t(2) : rng.normal());
  }
  if (trial % 2 == 0) {
    inst.denominator_mean = law.mean();
    inst.numerator_mean = law.mean() * v_loc;
  } else {
    inst.denominator_mean = law.mean() * std::exp(rng.normal());
    inst.numerator_mean = 3.0 * rng.normal();
  }
  return inst;
}

/// Deterministic-inequality audit over randomized realizations, conditioned
/// on D_hat > 0 (degenerate draws are counted in `excluded`).
inline AuditSummary run_lemma2_audits(const Lemma2AuditOptions& opt) {
  struct Slot {
    bool excluded = false;
    double relative_slack = 0.0;
  };
  std::vector<Slot> slots(opt.trials);
  parallel_for(opt.trials, opt.threads, [&](std::size_t t) {
    const auto inst = make_lemma2_instance(opt, static_cast<std::uint32_t>(t));
    double sum_u = 0.0;
    for (double x : inst.u) sum_u += x;
    if (!(sum_u > 0.0)) {
      slots[t].excluded = true;
      return;
    }
    slots[t].relative_slack =
        lemma2_audit(inst.u, inst.v, inst.numerator_mean, inst.denominator_mean, inst.alpha)
            .relative_slack();
  });
  AuditSummary s;
  s.trials = opt.trials;
  for (std::size_t t = 0; t < slots.size(); ++t) {
    if (slots[t].excluded) {
      ++s.excluded;
      continue;
    }
    ++s.evaluated;
    s.min_relative_slack = std::min(s.min_relative_slack, slots[t].relative_slack);
    if (slots[t].relative_slack < -opt.tolerance) {
      ++s.violations;
      if (!s.first_offending_trial) s.first_offending_trial = static_cast<std::uint32_t>(t);
    }
  }
  return s;
}

struct PisierAuditOptions {
  std::size_t trials = 1000;
  std::uint64_t seed = 15;
  std::size_t length = 100;
};

inline AuditSummary run_pisier_audits(const PisierAuditOptions& opt) {
  AuditSummary s;
  s.trials = opt.trials;
  std::vector<double> v(opt.length);
  for (std::size_t t = 0; t < opt.trials; ++t) {
    CounterRng rng(opt.seed, static_cast<std::uint32_t>(t), Stream::generic);
    const double e = 0.25 + 7.75 * rng.uniform();
    for (auto& x : v) x = (t % 2 == 0) ? rng.normal() : rng.student_t(1);
    const auto c = pisier_check(v, e);
    ++s.evaluated;
    const double rel = (c.rhs - c.lhs) / std::max(1.0, c.rhs);
    s.min_relative_slack = std::min(s.min_relative_slack, rel);
    if (!c.holds()) {
      ++s.violations;
      if (!s.first_offending_trial) s.first_offending_trial = static_cast<std::uint32_t>(t);
    }
  }
  return s;
}

}  // namespace rml
