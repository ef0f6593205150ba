#pragma once

// Elementary random variates on top of ncdir::Rng. Implemented here rather
// than through <random> distributions so that draws are identical across
// standard libraries for a given seed.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "ncdir/rng.hpp"

namespace ncdir {

/// Standard normal by the Marsaglia polar method (one of the pair is discarded).
inline double standard_normal(Rng& rng) {
  for (;;) {
    const double u = 2.0 * rng.uniform() - 1.0;
    const double v = 2.0 * rng.uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

/// Gamma(shape, scale) by Marsaglia-Tsang; shape < 1 uses the U^{1/shape} boost.
inline double gamma_variate(double shape, double scale, Rng& rng) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::domain_error("gamma_variate: shape and scale must be > 0");
  if (shape < 1.0) {
    const double g = gamma_variate(shape + 1.0, 1.0, rng);
    return scale * g * std::pow(rng.uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z, v;
    do {
      z = standard_normal(rng);
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * z * z * z * z) return scale * d * v;
    if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return scale * d * v;
  }
}

/// Central chi-squared with g > 0 degrees of freedom: Gamma(g/2, scale 2).
inline double chisq_variate(double g, Rng& rng) { return gamma_variate(0.5 * g, 2.0, rng); }

inline double beta_variate(double a, double b, Rng& rng) {
  const double x = gamma_variate(a, 1.0, rng);
  const double y = gamma_variate(b, 1.0, rng);
  return x / (x + y);
}

namespace detail {

inline constexpr double kPoissonInversionLimit = 30.0;

// Sequential-search inversion; restarts in the (rounding-induced) case where
// the cumulative sum stalls below u.
inline std::uint64_t poisson_inversion(double mu, Rng& rng) {
  for (;;) {
    const double u = rng.uniform();
    double p = std::exp(-mu);
    double cdf = p;
    std::uint64_t k = 0;
    while (u > cdf && k < 1000) {
      ++k;
      p *= mu / static_cast<double>(k);
      cdf += p;
    }
    if (k < 1000) return k;
  }
}

// Hormann (1993) PTRS transformed rejection with squeeze.
inline std::uint64_t poisson_ptrs(double mu, Rng& rng) {
  const double slam = std::sqrt(mu);
  const double loglam = std::log(mu);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mu + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mu + k * loglam - std::lgamma(k + 1.0))
      return static_cast<std::uint64_t>(k);
  }
}

}  // namespace detail

/// Poisson(mu): inversion below mu = 30, PTRS rejection above.
inline std::uint64_t poisson_variate(double mu, Rng& rng) {
  if (!(mu >= 0.0)) throw std::domain_error("poisson_variate: mean must be >= 0");
  if (mu == 0.0) return 0;
  if (mu < detail::kPoissonInversionLimit) return detail::poisson_inversion(mu, rng);
  return detail::poisson_ptrs(mu, rng);
}

/// Dirichlet proportions (all D+1 components) from independent unit-scale gammas.
inline std::vector<double> dirichlet_variate(std::span<const double> shape, Rng& rng) {
  std::vector<double> y(shape.size());
  double total = 0.0;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    y[i] = gamma_variate(shape[i], 1.0, rng);
    total += y[i];
  }
  for (double& v : y) v /= total;
  return y;
}

}  // namespace ncdir
