#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rml/moment_params.hpp"
#include "rml/nw_regression.hpp"

using namespace rml;

namespace {

SamplePath manual_path(std::vector<double> x, std::vector<double> y) {
  SamplePath p;
  p.n = x.size();
  p.dim = 1;
  p.first = std::move(x);
  p.second = std::move(y);
  p.spec = make_iid_regression(default_regression_model());
  return p;
}

}  // namespace

TEST(NwEstimate, HandExample) {
  const auto path = manual_path({0.0, 0.5}, {2.0, 6.0});
  const auto k = make_kernel(KernelName::epanechnikov, 1);
  const auto est = nw_estimate(0.0, path, k, 1.0);
  ASSERT_TRUE(est.r_hat);
  EXPECT_NEAR(*est.r_hat, 3.7142857142857144, 1e-15);
  EXPECT_DOUBLE_EQ(est.f_hat, (0.75 + 0.5625) / 2);
  EXPECT_DOUBLE_EQ(est.g_hat, (0.75 * 2 + 0.5625 * 6) / 2);
}

TEST(NwEstimate, SinglePoint) {
  const auto path = manual_path({0.3}, {5.0});
  const auto k = make_kernel(KernelName::triangle, 1);
  for (double h : {0.01, 0.5, 10.0}) EXPECT_EQ(*nw_estimate(0.3, path, k, h).r_hat, 5.0);
}

TEST(NwEstimate, ConstantResponseIsExact) {
  RegressionModel m;
  m.response = ResponseKind::constant;
  m.response_constant = -1.7;
  m.noise_sd = 0.0;
  const auto path = simulate(make_iid_regression(m), 2000, {1, 0});
  const auto k = make_kernel(KernelName::quartic, 1);
  for (double x : {0.1, 0.5, 0.93}) EXPECT_EQ(*nw_estimate(x, path, k, 0.05).r_hat, -1.7);
}

TEST(NwEstimate, UndefinedOutsideSupport) {
  const auto path = manual_path({0.0, 0.5}, {2.0, 6.0});
  const auto est = nw_estimate(3.0, path, make_kernel(KernelName::epanechnikov, 1), 1.0);
  EXPECT_FALSE(est.r_hat);
  EXPECT_EQ(est.f_hat, 0.0);
}

TEST(NwEstimate, Locality) {
  // Moving a far observation leaves the estimate unchanged.
  auto a = manual_path({0.1, 0.2, 0.9}, {1.0, 2.0, 3.0});
  auto b = manual_path({0.1, 0.2, 0.95}, {1.0, 2.0, 30.0});
  const auto k = make_kernel(KernelName::epanechnikov, 1);
  EXPECT_EQ(*nw_estimate(0.15, a, k, 0.2).r_hat, *nw_estimate(0.15, b, k, 0.2).r_hat);
}

TEST(NwEstimate, RejectsBadInput) {
  const auto path = manual_path({0.0}, {1.0});
  const auto k = make_kernel(KernelName::epanechnikov, 1);
  EXPECT_THROW(nw_estimate(0.0, path, k, 0.0), invalid_params);
  EXPECT_THROW(nw_estimate(0.0, path, make_kernel(KernelName::epanechnikov, 2), 1.0), invalid_params);
  const auto pairs = simulate(make_iid_pairs(PairModel{}), 5, {1, 0});
  EXPECT_THROW(nw_estimate(0.0, pairs, k, 1.0), invalid_spec);
}

TEST(NwEvaluator, AgreesWithDirectEstimate) {
  const auto path = simulate(make_iid_regression(default_regression_model()), 3000, {5, 1});
  const auto k = make_kernel(KernelName::epanechnikov, 1);
  const NwEvaluator eval(path, k);
  for (double x = 0.0; x <= 1.0; x += 0.037) {
    const auto a = nw_estimate(x, path, k, 0.08);
    const auto b = eval(x, 0.08);
    ASSERT_EQ(a.r_hat.has_value(), b.r_hat.has_value());
    EXPECT_NEAR(*a.r_hat, *b.r_hat, 1e-12);
    EXPECT_NEAR(a.f_hat, b.f_hat, 1e-12);
  }
}

TEST(NwEvaluator, TwoDimensional) {
  RegressionModel m;
  m.d = 2;
  const auto path = simulate(make_iid_regression(m), 2000, {2, 0});
  const auto k = make_kernel(KernelName::epanechnikov, 2);
  const NwEvaluator eval(path, k);
  const std::vector<double> x{0.4, 0.6};
  EXPECT_NEAR(*nw_estimate(x, path, k, 0.2).r_hat, *eval(x, 0.2).r_hat, 1e-12);
}

TEST(Grid, CoversBoxWithRequestedMesh) {
  const auto g = make_grid(Box{0.2, 0.8}, 1, 0.1);
  ASSERT_EQ(g.size(), 7u);
  EXPECT_EQ(g.point(0)[0], 0.2);
  EXPECT_EQ(g.point(6)[0], 0.8);
  EXPECT_LE(g.mesh, 0.1 + 1e-15);
  for (std::size_t k = 1; k < g.size(); ++k) EXPECT_GT(g.point(k)[0], g.point(k - 1)[0]);
  const auto g2 = make_grid(Box{0.2, 0.8}, 2, 0.25);
  EXPECT_EQ(g2.size(), 16u);
  EXPECT_THROW(make_grid(Box{}, 1, 0.0), invalid_params);
}

TEST(Grid, MeshShrinksWithN) {
  EXPECT_GT(grid_mesh(0.3, 100, 1), grid_mesh(0.3, 10000, 1));
  EXPECT_NEAR(grid_mesh(0.25, 1024, 1), 0.25 / 16.0, 1e-15);
}

TEST(SupDeviation, ConstantNoiselessIsZero) {
  RegressionModel m;
  m.response = ResponseKind::constant;
  m.response_constant = 2.0;
  m.noise_sd = 0.0;
  const auto path = simulate(make_iid_regression(m), 500, {1, 0});
  const auto g = make_grid(m.region, 1, 0.01);
  const auto s = sup_deviation(g, path, make_kernel(KernelName::epanechnikov, 1), 0.1, m);
  EXPECT_EQ(s.sup_err, 0.0);
  EXPECT_EQ(s.n_excluded, 0u);
}

TEST(SupDeviation, SinglePointGridIsPointwise) {
  const auto m = default_regression_model();
  const auto path = simulate(make_iid_regression(m), 1000, {3, 0});
  const auto k = make_kernel(KernelName::epanechnikov, 1);
  EvalGrid g;
  g.points = {0.37};
  const auto s = sup_deviation(g, path, k, 0.1, m);
  const double x = 0.37;
  EXPECT_NEAR(s.sup_err, std::abs(*nw_estimate(x, path, k, 0.1).r_hat - m.regression(std::span<const double>(&x, 1))),
              1e-12);
}

TEST(SupDeviation, ExceedsMedianPointwiseError) {
  const auto m = default_regression_model();
  const std::size_t n = 4096;
  const double h = bandwidth_uniform(static_cast<long long>(n), m.rho, 1, 1.0);
  const auto path = simulate(make_iid_regression(m), n, {7, 0});
  const auto k = make_kernel(KernelName::epanechnikov, 1);
  const auto g = make_grid(m.region, 1, grid_mesh(h, n, 1));
  const NwEvaluator eval(path, k);
  std::vector<double> errs;
  for (std::size_t i = 0; i < g.size(); ++i) {
    errs.push_back(std::abs(*eval(g.point(i), h).r_hat - m.regression(g.point(i))));
  }
  std::nth_element(errs.begin(), errs.begin() + errs.size() / 2, errs.end());
  const auto s = sup_deviation(g, path, k, h, m);
  EXPECT_GT(s.sup_err, errs[errs.size() / 2]);
}

TEST(SupDeviation, AllExcludedThrows) {
  const auto path = manual_path({5.0}, {1.0});
  const auto g = make_grid(Box{}, 1, 0.1);
  EXPECT_THROW(sup_deviation(g, path, make_kernel(KernelName::epanechnikov, 1), 0.1, default_regression_model()),
               all_excluded);
}

TEST(GridCsv, MarksExcludedPoints) {
  const auto path = manual_path({0.2}, {1.0});
  const auto g = make_grid(Box{0.2, 0.8}, 1, 0.3);
  std::ostringstream os;
  write_grid_csv(os, g, NwEvaluator(path, make_kernel(KernelName::epanechnikov, 1)), 0.1);
  EXPECT_EQ(os.str(), "x,r_hat,f_hat,g_hat,excluded\n0.2,1,7.5,7.5,0\n0.5,nan,0,0,1\n0.8,nan,0,0,1\n");
}

TEST(Autocovariance, KnownSequence) {
  const std::vector<double> z{1, 2, 3, 4};
  // mean 2.5; deviations -1.5 -0.5 0.5 1.5
  EXPECT_DOUBLE_EQ(empirical_autocovariance(z, 0), 5.0 / 4);
  EXPECT_DOUBLE_EQ(empirical_autocovariance(z, 1), (0.75 - 0.25 + 0.75) / 4);
}

TEST(CensoredCov, NoCensoringMatchesUncensored) {
  const auto path = simulate(make_censored(0.5, 1.0, 1.0), 5000, {1, 0});
  const auto est = censored_cov_estimate(path, 5);
  for (int l = 1; l <= 5; ++l) {
    EXPECT_EQ(est[static_cast<std::size_t>(l - 1)], empirical_autocovariance(path.latent, static_cast<std::size_t>(l)));
  }
}

TEST(CensoredCov, Preconditions) {
  const auto path = simulate(make_censored(0.5, 1.0, 0.5), 20, {1, 0});
  EXPECT_THROW(censored_cov_estimate(path, 0), invalid_params);
  EXPECT_THROW(censored_cov_estimate(path, 5), invalid_params);
  const auto reg = simulate(make_iid_regression(default_regression_model()), 100, {1, 0});
  EXPECT_THROW(censored_cov_estimate(reg, 2), invalid_spec);
}

TEST(CensoredCov, DegenerateDenominator) {
  // With keep probability 1e-9 essentially every C_i is zero.
  const auto path = simulate(make_censored(0.5, 1.0, 1e-9), 1000, {1, 0});
  EXPECT_THROW(censored_cov_estimate(path, 3), degenerate_denominator);
}

TEST(CensoredCov, RecoversLatentCovariance) {
  const auto spec = make_censored(0.5, 1.0, 0.6);
  const auto path = simulate(spec, 200000, {4, 0});
  const auto est = censored_cov_estimate(path, 2);
  EXPECT_NEAR(est[0], spec.gamma_x(1), 0.05);
  EXPECT_NEAR(est[1], spec.gamma_x(2), 0.05);
}
