#pragma once

// Summary statistics and the large-sample tests used by the validation and
// timing protocols.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace ncdir::stats {

inline double mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean: empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Sample standard deviation with the n-1 divisor.
inline double sample_sd(std::span<const double> v) {
  if (v.size() < 2) throw std::invalid_argument("sample_sd: need at least two values");
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median: empty sample");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double hi = v[mid];
  const double lo = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lo + hi);
}

/// Standard normal CDF, Phi(z) = erfc(-z / sqrt 2) / 2. The libm erfc is
/// accurate to a few ulp, well inside 1e-12 absolute.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Two-tailed large-sample Z test of H0: mean = mu0.
/// z = (mean - mu0) sqrt(n) / sd,  p = 2 (1 - Phi(|z|)).
inline double two_tailed_z(double sample_mean, double sample_sd, std::size_t n, double mu0) {
  if (n < 2) throw std::domain_error("two_tailed_z: need n >= 2");
  if (!(sample_sd > 0.0)) throw std::domain_error("two_tailed_z: degenerate (zero) sd");
  const double z = (sample_mean - mu0) * std::sqrt(static_cast<double>(n)) / sample_sd;
  return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

inline double z_statistic(double sample_mean, double sample_sd, std::size_t n, double mu0) {
  return (sample_mean - mu0) * std::sqrt(static_cast<double>(n)) / sample_sd;
}

/// One-tailed two-sample Z test of H0: mu_a - mu_b >= 0 against mu_a < mu_b.
/// Returns Phi(z) with z = (mean_a - mean_b) / sqrt(sd_a^2/n_a + sd_b^2/n_b).
inline double one_tailed_z_less(double mean_a, double sd_a, std::size_t n_a, double mean_b,
                                double sd_b, std::size_t n_b) {
  if (n_a < 2 || n_b < 2) throw std::domain_error("one_tailed_z_less: need n >= 2");
  const double se = std::sqrt(sd_a * sd_a / static_cast<double>(n_a) +
                              sd_b * sd_b / static_cast<double>(n_b));
  if (!(se > 0.0)) throw std::domain_error("one_tailed_z_less: degenerate (zero) sd");
  return normal_cdf((mean_a - mean_b) / se);
}

/// Kolmogorov survival function Q(t) = 2 sum_k (-1)^{k-1} exp(-2 k^2 t^2).
inline double kolmogorov_q(double t) {
  if (t < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test, asymptotic p-value with Stephens' correction.
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

/// One-sample Kolmogorov-Smirnov test against Uniform(0, 1).
inline KsResult ks_uniform(std::vector<double> u) {
  if (u.empty()) throw std::invalid_argument("ks_uniform: empty sample");
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double f = std::clamp(u[i], 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(n);
  return {d, kolmogorov_q((sn + 0.12 + 0.11 / sn) * d)};
}

/// Pearson correlation coefficient.
inline double correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("correlation: need two equal-length samples of size >= 2");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace ncdir::stats
