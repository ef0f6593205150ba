#pragma once

// Scalar special-function kernels: Pochhammer symbols, generalized
// hypergeometric series, Kummer's 1F1 and the m-variate Humbert Psi2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "ncdir/errors.hpp"
#include "ncdir/series_control.hpp"

namespace ncdir {

/// Value of a truncated series together with the number of terms it took.
struct SeriesSum {
  double value = 0.0;
  std::size_t terms = 0;
};

namespace detail {

using quiet_policy = boost::math::policies::policy<
    boost::math::policies::overflow_error<boost::math::policies::ignore_error>,
    boost::math::policies::underflow_error<boost::math::policies::ignore_error>,
    boost::math::policies::denorm_error<boost::math::policies::ignore_error>>;

inline constexpr unsigned kDirectProductMaxLength = 20;
inline constexpr double kDirectProductMaxMagnitude = 1e300;

inline void require_positive(double a, const char* where) {
  if (!(a > 0.0)) throw std::domain_error(std::string(where) + ": requires a > 0");
}

// Iterated product a (a+1) ... (a+l-1); returns false if it leaves the safe range.
inline bool direct_product(double a, unsigned l, long double& out) {
  if (l > kDirectProductMaxLength) return false;
  long double p = 1.0L;
  for (unsigned k = 0; k < l; ++k) {
    p *= static_cast<long double>(a) + k;
    if (p > kDirectProductMaxMagnitude) return false;
  }
  out = p;
  return true;
}

// Gamma(a) / Gamma(a + l) in extended precision; 0 when it underflows.
inline long double inverse_rising_ratio(double a, unsigned l) {
  return boost::math::tgamma_delta_ratio(static_cast<long double>(a), static_cast<long double>(l),
                                         quiet_policy());
}

inline bool is_nonpositive_integer(double v) { return v <= 0.0 && v == std::floor(v); }

}  // namespace detail

/// log of the ascending factorial (a)_l = Gamma(a+l)/Gamma(a), a > 0.
inline double log_pochhammer(double a, unsigned l) {
  detail::require_positive(a, "log_pochhammer");
  if (l == 0) return 0.0;
  long double p;
  if (detail::direct_product(a, l, p)) return static_cast<double>(std::log(p));
  const long double ratio = detail::inverse_rising_ratio(a, l);
  if (std::isnormal(ratio)) return static_cast<double>(-std::log(ratio));
  const long double la = a;
  return static_cast<double>(boost::math::lgamma(la + l, detail::quiet_policy()) -
                             boost::math::lgamma(la, detail::quiet_policy()));
}

/// Ascending factorial (a)_l; +inf when the value exceeds double range.
/// Products and gamma ratios are formed in extended precision and rounded once.
inline double pochhammer(double a, unsigned l) {
  detail::require_positive(a, "pochhammer");
  long double p;
  if (detail::direct_product(a, l, p)) return static_cast<double>(p);
  const long double ratio = detail::inverse_rising_ratio(a, l);
  if (std::isnormal(ratio)) return static_cast<double>(1.0L / ratio);
  return std::exp(log_pochhammer(a, l));
}

/// Generalized hypergeometric series pFq(upper; lower; x) with its term count.
///
/// Terms follow t_{i+1} = t_i * prod(a+i) / prod(b+i) * x / (i+1).
inline SeriesSum pfq_series(std::span<const double> upper, std::span<const double> lower,
                            double x, const SeriesControl& ctl = {}) {
  ctl.validate();
  for (double b : lower) {
    if (detail::is_nonpositive_integer(b))
      throw BadParameter("pfq: lower parameter " + std::to_string(b) +
                         " is a non-positive integer");
  }
  const bool terminating = std::any_of(upper.begin(), upper.end(), detail::is_nonpositive_integer);
  const std::size_t p = upper.size();
  const std::size_t q = lower.size();
  if (!terminating && x != 0.0 && (p > q + 1 || (p == q + 1 && !(std::abs(x) < 1.0))))
    throw BadParameter("pfq: series diverges for p=" + std::to_string(p) +
                       ", q=" + std::to_string(q) + ", x=" + std::to_string(x));

  double term = 1.0;
  double sum = 1.0;
  GuardCounter guard(ctl);
  for (std::size_t i = 0;; ++i) {
    if (i + 1 >= ctl.max_terms) throw NonConvergent("pfq", i + 1, sum, term);
    double ratio = x / static_cast<double>(i + 1);
    for (double a : upper) ratio *= a + i;
    for (double b : lower) ratio /= b + i;
    term *= ratio;
    sum += term;
    if (term == 0.0 && terminating) return {sum, i + 2};
    if (guard.accept(term, sum)) return {sum, i + 2};
  }
}

inline double pfq(std::span<const double> upper, std::span<const double> lower, double x,
                  const SeriesControl& ctl = {}) {
  return pfq_series(upper, lower, x, ctl).value;
}

/// Kummer's confluent hypergeometric function 1F1(a; b; x).
inline SeriesSum kummer_1f1_series(double a, double b, double x, const SeriesControl& ctl = {}) {
  const double up[1] = {a};
  const double lo[1] = {b};
  return pfq_series(up, lo, x, ctl);
}

inline double kummer_1f1(double a, double b, double x, const SeriesControl& ctl = {}) {
  return kummer_1f1_series(a, b, x, ctl).value;
}

/// Residuals of the two contiguous relations of 1F1, each divided by the
/// largest magnitude among its three contributions:
///   b(a+x)M(a,b) + x(a-b)M(a,b+1) - ab M(a+1,b) = 0
///   (a-1+x)M(a,b) + (b-a)M(a-1,b) + (1-b)M(a,b-1) = 0
inline std::pair<double, double> check_1f1_recurrences(double a, double b, double x,
                                                       const SeriesControl& ctl = {}) {
  const double m = kummer_1f1(a, b, x, ctl);
  const double t1[3] = {b * (a + x) * m, x * (a - b) * kummer_1f1(a, b + 1, x, ctl),
                        -a * b * kummer_1f1(a + 1, b, x, ctl)};
  const double t2[3] = {(a - 1 + x) * m, (b - a) * kummer_1f1(a - 1, b, x, ctl),
                        (1 - b) * kummer_1f1(a, b - 1, x, ctl)};
  auto scaled = [](const double (&t)[3]) {
    const double scale =
        std::max({std::abs(t[0]), std::abs(t[1]), std::abs(t[2]), 1e-300});
    return std::abs(t[0] + t[1] + t[2]) / scale;
  };
  return {scaled(t1), scaled(t2)};
}

/// m-variate Humbert confluent series
///   Psi2(a; b_1..b_m; x_1..x_m) = sum_j (a)_{|j|} prod_i x_i^{j_i} / ((b_i)_{j_i} j_i!)
/// summed layer by layer in the total degree n = |j|. Each layer is the
/// degree-n coefficient of the product of the m univariate series, built by
/// incremental convolution. `terms` counts layers.
inline SeriesSum humbert_psi2_series(double a, std::span<const double> b,
                                     std::span<const double> x, const SeriesControl& ctl = {}) {
  ctl.validate();
  const std::size_t m = b.size();
  if (m == 0 || x.size() != m)
    throw std::invalid_argument("humbert_psi2: b and x must be non-empty and of equal length");
  for (double bi : b) {
    if (!(bi > 0.0)) throw BadParameter("humbert_psi2: lower parameters must be > 0");
  }
  for (double xi : x) {
    if (!(xi >= 0.0)) throw std::domain_error("humbert_psi2: arguments must be >= 0");
  }

  // coef[i][k] = x_i^k / ((b_i)_k k!);  conv[r][n] = degree-n coefficient of
  // the product of the first r+1 univariate series.
  std::vector<std::vector<double>> coef(m), conv(m);
  double sum = 0.0;
  double rising = 1.0;  // (a)_n
  GuardCounter guard(ctl);
  for (std::size_t n = 0;; ++n) {
    if (n >= ctl.max_terms) throw NonConvergent("humbert_psi2", n, sum, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      coef[i].push_back(n == 0 ? 1.0
                               : coef[i][n - 1] * x[i] / ((b[i] + (n - 1)) * static_cast<double>(n)));
    }
    conv[0].push_back(coef[0][n]);
    for (std::size_t r = 1; r < m; ++r) {
      double c = 0.0;
      for (std::size_t k = 0; k <= n; ++k) c += coef[r][k] * conv[r - 1][n - k];
      conv[r].push_back(c);
    }
    if (n > 0) rising *= a + (n - 1);
    const double layer = rising * conv[m - 1][n];
    sum += layer;
    if (n > 0 && guard.accept(layer, sum)) return {sum, n + 1};
  }
}

inline double humbert_psi2(double a, std::span<const double> b, std::span<const double> x,
                           const SeriesControl& ctl = {}) {
  return humbert_psi2_series(a, b, x, ctl).value;
}

}  // namespace ncdir
