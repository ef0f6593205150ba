#pragma once

// Mixed raw moments E[X'_1^{r1} X'_2^{r2}] of the bivariate non-central
// Dirichlet NcDir^2(alpha_1, alpha_2, alpha_3, lambda_1, lambda_2, lambda_3).
//
// Three general algorithms are provided:
//   * moment_definition_series  triple series of Dirichlet moments weighted by
//                               Multi-Poisson^3(lambda/2) probabilities;
//   * moment_hypergeo_series    double series over (j3, j2) whose terms carry a
//                               2F2(alpha_1+r1, alpha+ + j; alpha_1, alpha+ + r+ + j; lambda_1/2);
//   * moment_finite_sum         the doubly finite sum over j1 <= r1, j2 <= r2 of
//                               1F1(alpha+ + j+; alpha+ + r+ + j+; lambda+/2) terms.
// plus the order-(1,1) closed forms with three and with two 1F1 values.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string_view>
#include <tuple>
#include <vector>

#include "ncdir/dist.hpp"
#include "ncdir/errors.hpp"
#include "ncdir/rng.hpp"
#include "ncdir/series_control.hpp"
#include "ncdir/specfun.hpp"

namespace ncdir {

enum class MomentMethod { DefinitionSeries, HypergeoSeries, FiniteSum, Closed11, Closed11Reduced };

constexpr std::string_view to_string(MomentMethod m) noexcept {
  switch (m) {
    case MomentMethod::DefinitionSeries: return "definition";
    case MomentMethod::HypergeoSeries: return "series";
    case MomentMethod::FiniteSum: return "finite";
    case MomentMethod::Closed11: return "closed11";
    case MomentMethod::Closed11Reduced: return "closed11-reduced";
  }
  return "unknown";
}

struct MomentResult {
  double value = 0.0;
  MomentMethod method = MomentMethod::FiniteSum;
  std::size_t terms_evaluated = 0;
  bool converged = true;
};

namespace detail {

inline void require_bivariate(const NcDirParams& p, const char* where) {
  if (p.dim() != 2)
    throw std::invalid_argument(std::string(where) + ": requires D = 2 (three parameters)");
}

// (a)_r1 (b)_r2 / (c)_{r1+r2}
inline double dirichlet_moment_factor(double a, double b, double c, MomentOrder order) {
  return pochhammer(a, order.r1) * pochhammer(b, order.r2) / pochhammer(c, order.r_plus());
}

// (a)_l / (b)_l, through log_pochhammer once the index passes the direct-product range.
inline double pochhammer_ratio(double a, double b, unsigned l, unsigned index_size) {
  if (index_size > kDirectProductMaxLength)
    return std::exp(log_pochhammer(a, l) - log_pochhammer(b, l));
  return pochhammer(a, l) / pochhammer(b, l);
}

// Both moments below treat the first two coordinates asymmetrically. They are
// evaluated with (alpha_1, lambda_1, r1) <= (alpha_2, lambda_2, r2) in
// lexicographic order, so a swapped input runs the identical computation.
inline bool needs_canonical_swap(const NcDirParams& p, MomentOrder order) {
  const auto a = p.alpha();
  const auto l = p.lambda();
  return std::tuple(a[1], l[1], order.r2) < std::tuple(a[0], l[0], order.r1);
}

inline double binomial(unsigned n, unsigned k) {
  double c = 1.0;
  for (unsigned i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return c;
}

}  // namespace detail

/// Definition series: sum over (j1, j2, j3) of Multi-Poisson^3 probabilities times
/// (alpha_1+j1)_{r1} (alpha_2+j2)_{r2} / (alpha+ + |j|)_{r+}, by total degree |j|.
inline MomentResult moment_definition_series(const NcDirParams& p, MomentOrder order,
                                             const SeriesControl& ctl = {}) {
  detail::require_bivariate(p, "moment_definition_series");
  ctl.validate();
  const auto a = p.alpha();
  const auto lam = p.lambda();

  std::array<std::vector<double>, 3> log_pois;
  std::array<std::size_t, 3> cap{};
  for (std::size_t i = 0; i < 3; ++i) cap[i] = lam[i] > 0.0 ? SIZE_MAX : 0;
  std::vector<double> up1, up2;  // (alpha_i + j)_{r_i}

  auto extend = [&](std::size_t n) {
    const double nn = static_cast<double>(n);
    for (std::size_t i = 0; i < 3; ++i) {
      if (n > cap[i]) continue;
      const double h = 0.5 * lam[i];
      log_pois[i].push_back((n == 0 ? 0.0 : nn * std::log(h)) - h - std::lgamma(nn + 1.0));
    }
    up1.push_back(pochhammer(a[0] + nn, order.r1));
    up2.push_back(pochhammer(a[1] + nn, order.r2));
  };

  double sum = 0.0;
  std::size_t terms = 0;
  GuardCounter guard(ctl);
  for (std::size_t n = 0;; ++n) {
    if (n >= ctl.max_terms) throw NonConvergent("moment_definition_series", n, sum, 0.0);
    extend(n);
    const double down = pochhammer(p.alpha_plus() + static_cast<double>(n), order.r_plus());
    // Terms (j1, j2) and (j2, j1) are added as a pair and every product is
    // grouped commutatively, so swapping the first two coordinates (with the
    // order) reproduces the sum bit for bit.
    auto term = [&](std::size_t j1, std::size_t j2, std::size_t j3) {
      if (j1 > cap[0] || j2 > cap[1]) return 0.0;
      ++terms;
      const double w = std::exp(log_pois[0][j1] + log_pois[1][j2] + log_pois[2][j3]);
      return w * (up1[j1] * up2[j2]) / down;
    };
    double layer = 0.0;
    for (std::size_t j3 = std::min(n, cap[2]) + 1; j3-- > 0;) {
      const std::size_t rest = n - j3;
      for (std::size_t k = 0; 2 * k <= rest; ++k) {
        layer += 2 * k == rest ? term(k, k, j3) : term(k, rest - k, j3) + term(rest - k, k, j3);
      }
    }
    sum += layer;
    if (n > 0 && guard.accept(layer, sum))
      return {sum, MomentMethod::DefinitionSeries, terms, true};
  }
}

/// Doubly infinite series of 2F2 values. The outer (j3) and inner (j2) sums
/// are truncated independently by the guard rule; each 2F2 is evaluated by pfq.
inline MomentResult moment_hypergeo_series(const NcDirParams& p, MomentOrder order,
                                           const SeriesControl& ctl = {}) {
  detail::require_bivariate(p, "moment_hypergeo_series");
  if (detail::needs_canonical_swap(p, order))
    return moment_hypergeo_series(p.swapped_first_two(), {order.r2, order.r1}, ctl);
  ctl.validate();
  const double a1 = p.alpha()[0];
  const double a2 = p.alpha()[1];
  const double ap = p.alpha_plus();
  const double h1 = 0.5 * p.lambda()[0];
  const double h2 = 0.5 * p.lambda()[1];
  const double h3 = 0.5 * p.lambda()[2];
  const double r1 = order.r1;
  const double r2 = order.r2;
  const double rp = order.r_plus();

  std::size_t terms = 0;
  double outer = 0.0;
  double c3 = 1.0;
  GuardCounter outer_guard(ctl);
  for (std::size_t j3 = 0;; ++j3) {
    if (j3 >= ctl.max_terms) throw NonConvergent("moment_hypergeo_series (j3)", j3, outer, c3);
    const double d3 = static_cast<double>(j3);
    double inner = 0.0;
    double c2 = 1.0;
    GuardCounter inner_guard(ctl);
    for (std::size_t j2 = 0;; ++j2) {
      if (j2 >= ctl.max_terms) throw NonConvergent("moment_hypergeo_series (j2)", j2, inner, c2);
      const double d2 = static_cast<double>(j2);
      const double upper[2] = {a1 + r1, ap + d2 + d3};
      const double lower[2] = {a1, ap + rp + d2 + d3};
      const SeriesSum f = pfq_series(upper, lower, h1, ctl);
      terms += f.terms;
      const double t = c2 * f.value;
      inner += t;
      if (inner_guard.accept(t, inner)) break;
      c2 *= (a2 + r2 + d2) * (ap + d3 + d2) / ((a2 + d2) * (ap + rp + d3 + d2)) * h2 / (d2 + 1.0);
    }
    const double t3 = c3 * inner;
    outer += t3;
    if (outer_guard.accept(t3, outer)) break;
    c3 *= (ap + d3) / (ap + rp + d3) * h3 / (d3 + 1.0);
  }
  const double value =
      detail::dirichlet_moment_factor(a1, a2, ap, order) * std::exp(-0.5 * p.lambda_plus()) * outer;
  return {value, MomentMethod::HypergeoSeries, terms, true};
}

/// Doubly finite sum over j1 <= r1, j2 <= r2 of
///   C(r1,j1) C(r2,j2) (a+)_{j+} h1^{j1} h2^{j2} / [(a+ + r+)_{j+} (a1)_{j1} (a2)_{j2}]
///   * 1F1(a+ + j+; a+ + r+ + j+; lambda+/2)
/// times (a1)_{r1} (a2)_{r2} / (a+)_{r+} e^{-lambda+/2}, with h_i = lambda_i / 2.
/// `ctl` only governs the 1F1 evaluations (one per distinct j+).
inline MomentResult moment_finite_sum(const NcDirParams& p, MomentOrder order,
                                      const SeriesControl& ctl = {}) {
  detail::require_bivariate(p, "moment_finite_sum");
  if (detail::needs_canonical_swap(p, order))
    return moment_finite_sum(p.swapped_first_two(), {order.r2, order.r1}, ctl);
  const double a1 = p.alpha()[0];
  const double a2 = p.alpha()[1];
  const double ap = p.alpha_plus();
  const double h1 = 0.5 * p.lambda()[0];
  const double h2 = 0.5 * p.lambda()[1];
  const double hp = 0.5 * p.lambda_plus();
  const unsigned rp = order.r_plus();

  std::size_t terms = 0;
  std::vector<double> kummer(rp + 1);
  for (unsigned jp = 0; jp <= rp; ++jp) {
    const SeriesSum f = kummer_1f1_series(ap + jp, ap + rp + jp, hp, ctl);
    kummer[jp] = f.value;
    terms += f.terms;
  }

  double sum = 0.0;
  for (unsigned j1 = 0; j1 <= order.r1; ++j1) {
    for (unsigned j2 = 0; j2 <= order.r2; ++j2) {
      const unsigned jp = j1 + j2;
      const double t = detail::binomial(order.r1, j1) * detail::binomial(order.r2, j2) *
                       detail::pochhammer_ratio(ap, ap + rp, jp, rp + jp) *
                       std::pow(h1, j1) * std::pow(h2, j2) /
                       (pochhammer(a1, j1) * pochhammer(a2, j2)) * kummer[jp];
      sum += t;
      ++terms;
    }
  }
  const double value =
      detail::dirichlet_moment_factor(a1, a2, ap, order) * std::exp(-hp) * sum;
  return {value, MomentMethod::FiniteSum, terms, true};
}

/// E[X'_1 X'_2] from three 1F1 values at lambda+/2 with parameter pairs
/// (a+; a+ + 2), (a+ + 1; a+ + 3), (a+ + 2; a+ + 4).
inline MomentResult moment_11_threeF(const NcDirParams& p, const SeriesControl& ctl = {}) {
  detail::require_bivariate(p, "moment_11_threeF");
  const double a1 = p.alpha()[0];
  const double a2 = p.alpha()[1];
  const double ap = p.alpha_plus();
  const double h1 = 0.5 * p.lambda()[0];
  const double h2 = 0.5 * p.lambda()[1];
  const double hp = 0.5 * p.lambda_plus();
  const double e = std::exp(-hp);

  const SeriesSum f0 = kummer_1f1_series(ap, ap + 2.0, hp, ctl);
  const SeriesSum f1 = kummer_1f1_series(ap + 1.0, ap + 3.0, hp, ctl);
  const SeriesSum f2 = kummer_1f1_series(ap + 2.0, ap + 4.0, hp, ctl);
  const double value = a1 * a2 / pochhammer(ap, 2) * e * f0.value +
                       (a1 * h2 + a2 * h1) / pochhammer(ap + 1.0, 2) * e * f1.value +
                       h1 * h2 / pochhammer(ap + 2.0, 2) * e * f2.value;
  return {value, MomentMethod::Closed11, f0.terms + f1.terms + f2.terms, true};
}

/// E[X'_1 X'_2] from two 1F1 values, 1F1(a+; a+ + 2) and 1F1(a+ + 1; a+ + 3);
/// requires lambda+ > 0.
inline MomentResult moment_11_reduced(const NcDirParams& p, const SeriesControl& ctl = {}) {
  detail::require_bivariate(p, "moment_11_reduced");
  if (!(p.lambda_plus() > 0.0))
    throw std::domain_error("moment_11_reduced: requires lambda+ > 0");
  const double a1 = p.alpha()[0];
  const double a2 = p.alpha()[1];
  const double ap = p.alpha_plus();
  const double h1 = 0.5 * p.lambda()[0];
  const double h2 = 0.5 * p.lambda()[1];
  const double hp = 0.5 * p.lambda_plus();
  const double e = std::exp(-hp);

  const SeriesSum f0 = kummer_1f1_series(ap, ap + 2.0, hp, ctl);
  const SeriesSum f1 = kummer_1f1_series(ap + 1.0, ap + 3.0, hp, ctl);
  const double shifted = ap + 1.0 + hp;
  const double value =
      a1 * a2 / pochhammer(ap, 2) * e * f0.value +
      ((a1 * h2 + a2 * h1) / (ap + 1.0) - h1 * h2 / shifted) / (ap + 2.0) * e * f1.value +
      h1 * h2 / (hp * shifted) * (1.0 - e * f1.value);
  return {value, MomentMethod::Closed11Reduced, f0.terms + f1.terms, true};
}

/// Descriptive mixed moment (1/N) sum x1^{r1} x2^{r2} over N definition-route draws.
inline double moment_mc(const NcDirParams& p, MomentOrder order, std::size_t n_draws, Rng& rng) {
  detail::require_bivariate(p, "moment_mc");
  if (n_draws < 1) throw std::invalid_argument("moment_mc: n_draws must be >= 1");
  double sum = 0.0;
  for (std::size_t i = 0; i < n_draws; ++i) {
    const SimplexPoint x = sample_ncdir_definition(p, rng);
    sum += std::pow(x[0], order.r1) * std::pow(x[1], order.r2);
  }
  return sum / static_cast<double>(n_draws);
}

/// Dispatch by method; Closed11 variants require order (1,1).
inline MomentResult compute_moment(const NcDirParams& p, MomentOrder order, MomentMethod method,
                                   const SeriesControl& ctl = {}) {
  switch (method) {
    case MomentMethod::DefinitionSeries: return moment_definition_series(p, order, ctl);
    case MomentMethod::HypergeoSeries: return moment_hypergeo_series(p, order, ctl);
    case MomentMethod::FiniteSum: return moment_finite_sum(p, order, ctl);
    case MomentMethod::Closed11:
    case MomentMethod::Closed11Reduced:
      if (order != MomentOrder{1, 1})
        throw std::invalid_argument("closed-form moments exist only for order (1,1)");
      return method == MomentMethod::Closed11 ? moment_11_threeF(p, ctl)
                                              : moment_11_reduced(p, ctl);
  }
  throw std::invalid_argument("compute_moment: unknown method");
}

}  // namespace ncdir
