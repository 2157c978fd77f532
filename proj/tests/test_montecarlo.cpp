#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "rml/montecarlo.hpp"

using namespace rml;

namespace {

ExperimentConfig unit_weight_config() {
  PairModel m;
  m.u = MarginalLaw::constant(1.0);
  m.v_mean = 2.0;
  m.noise = NoiseLaw::normal(1.0);
  ExperimentConfig cfg;
  cfg.process = make_iid_pairs(m);
  cfg.n_grid = {16, 64, 256};
  cfg.M = 2000;
  cfg.master_seed = 12;
  cfg.threads = 1;
  return cfg;
}

std::vector<NormRow> power_law(std::vector<long long> ns, double c, double e) {
  std::vector<NormRow> rows;
  for (long long n : ns) {
    NormRow r;
    r.n = n;
    r.p = 2;
    r.norm = c * std::pow(static_cast<double>(n), -e);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TEST(EmpiricalLp, Examples) {
  const std::vector<double> s{3, -4};
  EXPECT_NEAR(empirical_lp(s, 2), 3.5355339059327378, 1e-15);
  EXPECT_DOUBLE_EQ(empirical_lp(s, 1), 3.5);
  const std::vector<double> one{-2.5};
  for (double p : {0.5, 1.0, 2.0, 7.0}) EXPECT_NEAR(empirical_lp(one, p), 2.5, 1e-14);
  EXPECT_THROW(empirical_lp(std::vector<double>{}, 2), empty_sample);
  EXPECT_THROW(empirical_lp(s, 0), invalid_params);
}

TEST(EmpiricalLp, MonotoneInOrder) {
  const std::vector<double> s{0.1, -2, 3, 0.5, -0.7};
  double prev = 0;
  for (double p = 0.5; p < 8; p += 0.5) {
    const double v = empirical_lp(s, p);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(FitRate, ExactPowerLaws) {
  auto f = fit_rate(power_law({100, 400, 1600}, 1.0, 0.5), Abscissa::n, 0.5, 0.01);
  EXPECT_NEAR(f.slope, -0.5, 1e-13);
  EXPECT_LT(f.rss, 1e-20);
  EXPECT_TRUE(f.pass);
  f = fit_rate(power_law({10, 100, 1000, 10000}, 7.3, 0.4), Abscissa::n, 0.5, 0.05);
  EXPECT_NEAR(f.slope, -0.4, 1e-13);
  EXPECT_NEAR(f.intercept, std::log(7.3), 1e-12);
  EXPECT_FALSE(f.pass);
}

TEST(FitRate, LogAbscissa) {
  std::vector<NormRow> rows;
  for (long long n : {100, 1000, 10000}) {
    NormRow r;
    r.n = n;
    r.norm = std::pow(static_cast<double>(n) / std::log(static_cast<double>(n)), -0.4);
    rows.push_back(r);
  }
  EXPECT_NEAR(fit_rate(rows, Abscissa::n_over_log_n, 0.4, 0.01).slope, -0.4, 1e-13);
}

TEST(FitRate, Degenerate) {
  EXPECT_THROW(fit_rate(power_law({100, 400}, 1, 0.5), Abscissa::n, 0.5, 0.1), degenerate_fit);
  EXPECT_THROW(fit_rate(power_law({100, 400, 1600}, 0, 0.5), Abscissa::n, 0.5, 0.1), degenerate_fit);
}

TEST(Replicate, NoiselessConstantRegressionGivesZeroNorms) {
  RegressionModel m;
  m.response = ResponseKind::constant;
  m.response_constant = 1.5;
  m.noise_sd = 0.0;
  ExperimentConfig cfg;
  cfg.process = make_iid_regression(m);
  cfg.estimator = Estimator::nw_pointwise;
  cfg.n_grid = {64, 128, 256};
  cfg.M = 20;
  cfg.threads = 1;
  const auto t = replicate(cfg);
  for (const auto& r : t.rows) EXPECT_EQ(r.norm, 0.0);
  EXPECT_THROW(fit_rate(cfg, t), degenerate_fit);
  cfg.estimator = Estimator::nw_sup;
  cfg.bandwidth = BandwidthRule::uniform;
  for (const auto& r : replicate(cfg).rows) EXPECT_EQ(r.norm, 0.0);
}

TEST(Replicate, UnitWeightsMatchInverseRootN) {
  const auto cfg = unit_weight_config();
  const auto t = replicate(cfg);
  ASSERT_EQ(t.rows.size(), 3u);
  for (const auto& r : t.rows) {
    EXPECT_LT(std::abs(r.norm - 1.0 / std::sqrt(static_cast<double>(r.n))), 3 * r.stderr_) << r.n;
    EXPECT_EQ(r.excluded, 0u);
    EXPECT_EQ(r.included, cfg.M);
  }
}

TEST(Replicate, IndependentOfThreadCount) {
  auto cfg = unit_weight_config();
  cfg.M = 300;
  cfg.extra_p = {1.0, 4.0};
  const auto a = replicate(cfg);
  cfg.threads = 4;
  const auto b = replicate(cfg);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].norm, b.rows[i].norm);
    EXPECT_EQ(a.rows[i].stderr_, b.rows[i].stderr_);
  }
  EXPECT_EQ(a.for_p(4.0).size(), 3u);
}

TEST(Replicate, ExclusionCap) {
  PairModel m;
  m.u = MarginalLaw::discrete({0.0, 1.0}, {0.5, 0.5});
  m.noise = NoiseLaw::normal(1.0);
  ExperimentConfig cfg;
  cfg.process = make_iid_pairs(m);
  cfg.n_grid = {1, 2, 3};
  cfg.M = 400;
  cfg.threads = 1;
  EXPECT_THROW(replicate(cfg), too_many_exclusions);
  const auto s = simulate_deviations(cfg, 1);
  EXPECT_EQ(s.excluded + s.values.size(), cfg.M);
  // About half the single-draw replications have U = 0.
  EXPECT_NEAR(static_cast<double>(s.excluded) / cfg.M, 0.5, 0.1);
  EXPECT_NO_THROW(check_exclusions(4, 400, 10));
  EXPECT_THROW(check_exclusions(5, 400, 10), too_many_exclusions);
}

TEST(Config, Validation) {
  auto cfg = unit_weight_config();
  cfg.n_grid = {10, 20};
  EXPECT_THROW(cfg.validate(), invalid_spec);
  cfg.n_grid = {10, 30, 20};
  EXPECT_THROW(cfg.validate(), invalid_spec);
  cfg = unit_weight_config();
  cfg.estimator = Estimator::nw_pointwise;
  EXPECT_THROW(cfg.validate(), invalid_spec);
  cfg = unit_weight_config();
  EXPECT_THROW(cfg.validate(100000), invalid_spec);
}

TEST(Bandwidth, Rules) {
  ExperimentConfig cfg;
  cfg.process = make_iid_regression(default_regression_model());
  cfg.estimator = Estimator::nw_pointwise;
  EXPECT_NEAR(bandwidth_for(cfg, 1024), 0.25, 1e-15);
  cfg.bandwidth = BandwidthRule::fixed;
  cfg.bandwidth_c = 0.3;
  EXPECT_EQ(bandwidth_for(cfg, 1024), 0.3);
}

TEST(Clt, UnitWeightLimits) {
  auto cfg = unit_weight_config();
  cfg.p = 4;
  const auto c1 = clt_check(cfg, 1.0);
  EXPECT_NEAR(c1.limit, std::sqrt(2 / std::numbers::pi), 1e-14);
  EXPECT_LT(std::abs(c1.lhs - c1.limit), 3 * c1.lhs_stderr);
  const auto c2 = clt_check(cfg, 2.0);
  EXPECT_NEAR(c2.limit, 1.0, 1e-14);
  EXPECT_EQ(c2.n, 256);
  EXPECT_THROW(clt_check(cfg, 4.0), invalid_params);
}

TEST(Clt, RejectsDependentSpecs) {
  auto cfg = unit_weight_config();
  cfg.process = make_ar1_pairs(cfg.process.pairs, 0.5);
  EXPECT_THROW(clt_check(cfg, 1.0), invalid_spec);
}

TEST(BiasSweepTest, ConstantIsExactZero) {
  RegressionModel m;
  m.response = ResponseKind::constant;
  m.response_constant = 3;
  const auto k = make_kernel(KernelName::epanechnikov, 1);
  const double x = 0.3;
  const auto s = bias_sweep(m, k, std::span<const double>(&x, 1), 0.4, 6);
  EXPECT_TRUE(s.exact_zero);
  EXPECT_EQ(s.h.size(), 6u);
}

TEST(Tolerances, Defaults) {
  EXPECT_EQ(default_tolerance(Estimator::weighted_sum, ProcessKind::iid_pairs), 0.08);
  EXPECT_EQ(default_tolerance(Estimator::weighted_sum, ProcessKind::ar1_pairs), 0.10);
  EXPECT_EQ(default_tolerance(Estimator::nw_pointwise, ProcessKind::iid_regression), 0.08);
  EXPECT_EQ(default_tolerance(Estimator::nw_sup, ProcessKind::iid_regression), 0.12);
}
