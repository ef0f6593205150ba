#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "ncdir/rng.hpp"
#include "ncdir/stats.hpp"
#include "ncdir/variates.hpp"

namespace {

using namespace ncdir;
using namespace ncdir::stats;

TEST(TwoTailedZ, MeanAtNullGivesOne) { EXPECT_EQ(two_tailed_z(0.3, 0.1, 30, 0.3), 1.0); }

TEST(TwoTailedZ, CriticalValueGivesFivePercent) {
  // mean chosen so that z = 1.959964 with sd = 1, n = 4
  EXPECT_NEAR(two_tailed_z(1.959964 / 2.0, 1.0, 4, 0.0), 0.05, 1e-6);
  EXPECT_NEAR(two_tailed_z(-1.959964 / 2.0, 1.0, 4, 0.0), 0.05, 1e-6);
}

TEST(TwoTailedZ, ReferenceValidationCell) {
  EXPECT_NEAR(two_tailed_z(0.07428, 0.00079, 30, 0.07426), 0.91441, 0.05);
}

TEST(TwoTailedZ, RejectsDegenerateInput) {
  EXPECT_THROW(two_tailed_z(1.0, 0.0, 10, 0.0), std::domain_error);
  EXPECT_THROW(two_tailed_z(1.0, 1.0, 1, 0.0), std::domain_error);
}

TEST(NormalCdf, KnownValues) {
  EXPECT_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.0), 0.84134474606854293, 1e-15);
  EXPECT_NEAR(normal_cdf(-3.0), 0.0013498980316300946, 1e-17);
  EXPECT_NEAR(normal_cdf(-8.0), 6.2209605742717841e-16, 1e-28);
}

TEST(OneTailed, FasterMethodGivesSmallPValue) {
  EXPECT_LT(one_tailed_z_less(1.0, 0.1, 30, 50.0, 2.0, 30), 1e-10);
  EXPECT_NEAR(one_tailed_z_less(1.0, 0.1, 30, 1.0, 0.1, 30), 0.5, 1e-15);
}

TEST(Summary, MeanSdMedian) {
  const std::vector<double> v = {4.0, 1.0, 3.0, 2.0};
  EXPECT_EQ(mean(v), 2.5);
  EXPECT_NEAR(sample_sd(v), std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_EQ(median(v), 2.5);
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
}

TEST(Kolmogorov, SurvivalFunctionTail) {
  EXPECT_EQ(kolmogorov_q(0.0), 1.0);
  EXPECT_NEAR(kolmogorov_q(1.36), 0.0494, 5e-4);
  EXPECT_NEAR(kolmogorov_q(1.63), 0.0098, 5e-4);
}

TEST(Kolmogorov, SameDistributionPassesShiftedFails) {
  Rng rng(8);
  std::vector<double> a(20'000), b(20'000), c(20'000);
  for (double& x : a) x = standard_normal(rng);
  for (double& x : b) x = standard_normal(rng);
  for (double& x : c) x = standard_normal(rng) + 0.1;
  EXPECT_GT(ks_two_sample(a, b).p_value, 0.01);
  EXPECT_LT(ks_two_sample(a, c).p_value, 1e-6);
}

TEST(Correlation, PerfectAndIndependent) {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  const std::vector<double> y = {2, 4, 6, 8, 10};
  EXPECT_NEAR(correlation(x, y), 1.0, 1e-15);
  Rng rng(3);
  std::vector<double> u(100'000), v(100'000);
  for (double& t : u) t = rng.uniform();
  for (double& t : v) t = rng.uniform();
  EXPECT_LT(std::abs(correlation(u, v)), 4.0 / std::sqrt(100'000.0));
}

}  // namespace
