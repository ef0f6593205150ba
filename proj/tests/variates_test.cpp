#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "ncdir/dist.hpp"
#include "ncdir/rng.hpp"
#include "ncdir/stats.hpp"
#include "ncdir/variates.hpp"
#include "support/oracles.hpp"

namespace {

using namespace ncdir;

TEST(Rng, SameSeedSameStream) {
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(Rng, SplitStreamsDiffer) {
  const Rng root(7);
  Rng s0 = root.split(0), s1 = root.split(1);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    seen.insert(s0());
    seen.insert(s1());
  }
  EXPECT_EQ(seen.size(), 2000u);
  EXPECT_NE(derive_seed(7, 0), derive_seed(7, 1));
}

TEST(Rng, UniformStaysInOpenInterval) {
  Rng rng(1);
  std::vector<double> u(50'000);
  for (double& v : u) {
    v = rng.uniform();
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
  EXPECT_GT(stats::ks_uniform(u).p_value, 0.01);
}

TEST(Variates, GammaMomentsForSmallAndLargeShape) {
  for (double shape : {0.2, 0.7, 1.0, 3.5, 40.0}) {
    Rng rng(static_cast<std::uint64_t>(shape * 1000));
    std::vector<double> v(400'000);
    for (double& x : v) x = gamma_variate(shape, 1.0, rng);
    const auto ms = ncdir::testing::mean_se(v);
    EXPECT_LE(std::abs(ms.mean - shape), 4.0 * ms.se) << shape;
  }
}

TEST(Variates, PoissonMeanAndVarianceAcrossBothRegimes) {
  for (double mu : {0.0, 0.4, 3.2, 29.0, 31.0, 250.0}) {
    Rng rng(static_cast<std::uint64_t>(mu * 10) + 3);
    std::vector<double> v(300'000);
    for (double& x : v) x = static_cast<double>(poisson_variate(mu, rng));
    if (mu == 0.0) {
      for (double x : v) ASSERT_EQ(x, 0.0);
      continue;
    }
    const auto ms = ncdir::testing::mean_se(v);
    EXPECT_LE(std::abs(ms.mean - mu), 4.0 * ms.se) << mu;
    const double sd = stats::sample_sd(v);
    EXPECT_NEAR(sd * sd / mu, 1.0, 0.02) << mu;
  }
}

TEST(Variates, DirichletSumsToOne) {
  Rng rng(4);
  const double shape[] = {0.3, 2.0, 5.0, 0.9};
  for (int i = 0; i < 1000; ++i) {
    const auto d = dirichlet_variate(shape, rng);
    ASSERT_EQ(d.size(), 4u);
    double s = 0.0;
    for (double v : d) {
      ASSERT_GE(v, 0.0);
      s += v;
    }
    ASSERT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(NoncentralChisq, CentralMeanIsDegreesOfFreedom) {
  Rng rng(12);
  std::vector<double> v(1'000'000);
  for (double& x : v) x = sample_noncentral_chisq(2.0, 0.0, rng);
  const auto ms = ncdir::testing::mean_se(v);
  EXPECT_LE(std::abs(ms.mean - 2.0), 3.0 * ms.se);
}

TEST(NoncentralChisq, MeanIsDegreesPlusNoncentrality) {
  Rng rng(13);
  std::vector<double> v(1'000'000);
  for (double& x : v) x = sample_noncentral_chisq(3.0, 5.0, rng);
  const auto ms = ncdir::testing::mean_se(v);
  EXPECT_LE(std::abs(ms.mean - 8.0), 3.0 * ms.se);
}

TEST(NoncentralChisq, LargeNoncentralityStaysFinite) {
  Rng rng(14);
  for (int i = 0; i < 1000; ++i) {
    const double y = sample_noncentral_chisq(1.0, 1000.0, rng);
    ASSERT_TRUE(std::isfinite(y));
    ASSERT_GT(y, 0.0);
  }
}

TEST(NoncentralChisq, MixtureRouteMatchesAdditiveRoute) {
  Rng a(15), b(16);
  std::vector<double> mix(100'000), add(100'000);
  for (double& x : mix) x = sample_noncentral_chisq(1.2, 6.4, a);
  for (double& x : add) x = ncdir::testing::sample_noncentral_chisq_additive(1.2, 6.4, b);
  EXPECT_GT(stats::ks_two_sample(mix, add).p_value, 0.01);
}

TEST(NoncentralChisq, RejectsInvalidArguments) {
  Rng rng(1);
  EXPECT_THROW(sample_noncentral_chisq(0.0, 1.0, rng), std::domain_error);
  EXPECT_THROW(sample_noncentral_chisq(1.0, -1.0, rng), std::domain_error);
}

TEST(MultiPoisson, ZeroRateGivesZeroCounts) {
  Rng rng(2);
  const double lambda[] = {0.0, 0.0, 0.0};
  for (int i = 0; i < 100; ++i) {
    const auto m = sample_multipoisson(lambda, rng);
    EXPECT_EQ(m.m_plus, 0u);
  }
}

TEST(MultiPoisson, TotalIsPoissonWithHalfTheSum) {
  Rng rng(3);
  const double lambda[] = {1.7, 6.4, 3.8};
  std::vector<double> totals(200'000);
  for (double& t : totals) {
    const auto m = sample_multipoisson(lambda, rng);
    ASSERT_EQ(m.m[0] + m.m[1] + m.m[2], m.m_plus);
    t = static_cast<double>(m.m_plus);
  }
  const auto ms = ncdir::testing::mean_se(totals);
  EXPECT_LE(std::abs(ms.mean - 5.95), 4.0 * ms.se);
}

}  // namespace
