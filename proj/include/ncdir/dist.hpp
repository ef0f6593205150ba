#pragma once

// Dirichlet building blocks and the non-central Dirichlet NcDir^D(alpha, lambda):
// densities (mixture and perturbation forms), the conditional density given
// the Poisson total M+, and three sampler routes.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncdir/errors.hpp"
#include "ncdir/rng.hpp"
#include "ncdir/series_control.hpp"
#include "ncdir/specfun.hpp"
#include "ncdir/variates.hpp"

namespace ncdir {

/// Shape vector alpha (D+1 positive reals) and non-centrality vector lambda
/// (D+1 non-negative reals), with cached totals.
class NcDirParams {
 public:
  NcDirParams(std::vector<double> alpha, std::vector<double> lambda)
      : alpha_(std::move(alpha)), lambda_(std::move(lambda)) {
    if (alpha_.size() != lambda_.size())
      throw std::invalid_argument("NcDirParams: alpha has " + std::to_string(alpha_.size()) +
                                  " entries but lambda has " + std::to_string(lambda_.size()) +
                                  " (dimension mismatch)");
    if (alpha_.size() < 2)
      throw std::invalid_argument("NcDirParams: need D+1 >= 2 entries (D >= 1)");
    for (std::size_t i = 0; i < alpha_.size(); ++i) {
      if (!(alpha_[i] > 0.0) || !std::isfinite(alpha_[i]))
        throw std::invalid_argument("NcDirParams: alpha_" + std::to_string(i + 1) +
                                    " must be a finite value > 0");
      if (!(lambda_[i] >= 0.0) || !std::isfinite(lambda_[i]))
        throw std::invalid_argument("NcDirParams: lambda_" + std::to_string(i + 1) +
                                    " must be a finite value >= 0");
    }
    alpha_plus_ = std::accumulate(alpha_.begin(), alpha_.end(), 0.0);
    lambda_plus_ = std::accumulate(lambda_.begin(), lambda_.end(), 0.0);
  }

  std::size_t dim() const noexcept { return alpha_.size() - 1; }
  std::span<const double> alpha() const noexcept { return alpha_; }
  std::span<const double> lambda() const noexcept { return lambda_; }
  double alpha_plus() const noexcept { return alpha_plus_; }
  double lambda_plus() const noexcept { return lambda_plus_; }

  /// Parameters with (alpha_1, lambda_1) and (alpha_2, lambda_2) swapped.
  NcDirParams swapped_first_two() const {
    auto a = alpha_;
    auto l = lambda_;
    std::swap(a[0], a[1]);
    std::swap(l[0], l[1]);
    return {std::move(a), std::move(l)};
  }

  friend bool operator==(const NcDirParams& x, const NcDirParams& y) {
    return x.alpha_ == y.alpha_ && x.lambda_ == y.lambda_;
  }

 private:
  std::vector<double> alpha_;
  std::vector<double> lambda_;
  double alpha_plus_ = 0.0;
  double lambda_plus_ = 0.0;
};

/// A point of the open unit simplex: 0 < x_i < 1 and sum x_i < 1.
class SimplexPoint {
 public:
  explicit SimplexPoint(std::vector<double> x) : x_(std::move(x)) {
    if (x_.empty()) throw std::domain_error("SimplexPoint: need at least one coordinate");
    double total = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
      if (!(x_[i] > 0.0 && x_[i] < 1.0))
        throw std::domain_error("SimplexPoint: x_" + std::to_string(i + 1) +
                                " must lie in (0, 1)");
      total += x_[i];
    }
    if (!(total < 1.0)) throw std::domain_error("SimplexPoint: coordinates must sum to < 1");
    remainder_ = 1.0 - total;
  }

  std::size_t dim() const noexcept { return x_.size(); }
  std::span<const double> coords() const noexcept { return x_; }
  double operator[](std::size_t i) const { return x_[i]; }
  /// 1 - sum x_i, the implicit (D+1)-th coordinate.
  double remainder() const noexcept { return remainder_; }

  static bool admissible(std::span<const double> x) {
    double total = 0.0;
    for (double v : x) {
      if (!(v > 0.0 && v < 1.0)) return false;
      total += v;
    }
    return total < 1.0;
  }

 private:
  std::vector<double> x_;
  double remainder_ = 0.0;
};

/// M ~ Multi-Poisson^{D+1}(lambda/2) realisation.
struct MultiPoissonDraw {
  std::vector<std::uint64_t> m;
  std::uint64_t m_plus = 0;
};

struct MomentOrder {
  unsigned r1 = 0;
  unsigned r2 = 0;
  unsigned r_plus() const noexcept { return r1 + r2; }
  friend bool operator==(const MomentOrder&, const MomentOrder&) = default;
};

/// Counts resamples taken on floating-point boundary hits.
struct SamplerDiagnostics {
  std::size_t boundary_retries = 0;
};

namespace detail {

inline void require_dims(std::size_t params, const SimplexPoint& x, const char* where) {
  if (params != x.dim() + 1)
    throw std::invalid_argument(std::string(where) + ": expected " + std::to_string(x.dim() + 1) +
                                " parameters for a point of dimension " + std::to_string(x.dim()));
}

// log Dir^D(x; a) with the (D+1)-th coordinate taken from x.remainder().
inline double log_dirichlet_density(std::span<const double> a, const SimplexPoint& x) {
  double total = 0.0;
  double out = 0.0;
  const std::size_t d = x.dim();
  for (std::size_t i = 0; i <= d; ++i) {
    total += a[i];
    out -= std::lgamma(a[i]);
    out += (a[i] - 1.0) * std::log(i < d ? x[i] : x.remainder());
  }
  return out + std::lgamma(total);
}

inline constexpr std::size_t kMaxBoundaryRetries = 64;

template <class Draw>
SimplexPoint retry_until_interior(Draw&& draw, SamplerDiagnostics* diag) {
  for (std::size_t attempt = 0; attempt <= kMaxBoundaryRetries; ++attempt) {
    std::vector<double> x = draw();
    if (SimplexPoint::admissible(x)) return SimplexPoint(std::move(x));
    if (diag) ++diag->boundary_retries;
  }
  throw std::runtime_error("sampler: repeated draws on the simplex boundary");
}

// Draws M_i ~ Poisson(lambda_i/2) and returns Y'_i ~ chi2_{g + 2 M_i}.
inline double noncentral_chisq_with_count(double g, double lambda, Rng& rng,
                                          std::uint64_t& count) {
  count = poisson_variate(0.5 * lambda, rng);
  return chisq_variate(g + 2.0 * static_cast<double>(count), rng);
}

// Visits every composition j of n into parts.size() parts with j_i <= cap[i].
template <class F>
void for_each_composition(std::size_t n, std::span<const std::size_t> cap,
                          std::vector<std::size_t>& j, std::size_t pos, F&& f) {
  if (pos + 1 == j.size()) {
    if (n <= cap[pos]) {
      j[pos] = n;
      f(j);
    }
    return;
  }
  const std::size_t hi = std::min(n, cap[pos]);
  for (std::size_t k = 0; k <= hi; ++k) {
    j[pos] = k;
    for_each_composition(n - k, cap, j, pos + 1, f);
  }
}

}  // namespace detail

/// Dirichlet density Dir^D(x; params) with params of length D+1.
inline double dirichlet_density(std::span<const double> params, const SimplexPoint& x) {
  detail::require_dims(params.size(), x, "dirichlet_density");
  for (double a : params) {
    if (!(a > 0.0)) throw std::domain_error("dirichlet_density: parameters must be > 0");
  }
  return std::exp(detail::log_dirichlet_density(params, x));
}

/// E[X_1^{r1} X_2^{r2}] for Dir^2(a1, a2, a3) = (a1)_{r1} (a2)_{r2} / (a+)_{r+}.
inline double dirichlet_mixed_moment(std::span<const double> params, MomentOrder order) {
  if (params.size() != 3)
    throw std::invalid_argument("dirichlet_mixed_moment: needs exactly 3 parameters");
  const double ap = params[0] + params[1] + params[2];
  return pochhammer(params[0], order.r1) * pochhammer(params[1], order.r2) /
         pochhammer(ap, order.r_plus());
}

/// Y' ~ chi'^2_g(lambda) through the Poisson(lambda/2) mixture of central chi-squared.
inline double sample_noncentral_chisq(double g, double lambda, Rng& rng) {
  if (!(g > 0.0) || !(lambda >= 0.0))
    throw std::domain_error("sample_noncentral_chisq: requires g > 0 and lambda >= 0");
  std::uint64_t m;
  return detail::noncentral_chisq_with_count(g, lambda, rng, m);
}

/// M_i ~ Poisson(lambda_i / 2) independently.
inline MultiPoissonDraw sample_multipoisson(std::span<const double> lambda, Rng& rng) {
  MultiPoissonDraw out;
  out.m.resize(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    out.m[i] = poisson_variate(0.5 * lambda[i], rng);
    out.m_plus += out.m[i];
  }
  return out;
}

/// Definition-route draw with the latent quantities it was built from.
struct DefinitionDraw {
  SimplexPoint x;
  double y_plus;
  MultiPoissonDraw m;
};

/// X' = (Y'_1, ..., Y'_D) / Y'+ with Y'_i ~ chi'^2_{2 alpha_i}(lambda_i), exposing Y'+ and M.
inline DefinitionDraw sample_ncdir_definition_traced(const NcDirParams& p, Rng& rng,
                                                     SamplerDiagnostics* diag = nullptr) {
  const std::size_t n = p.dim() + 1;
  std::vector<double> y(n);
  MultiPoissonDraw m;
  m.m.resize(n);
  for (std::size_t attempt = 0;; ++attempt) {
    double total = 0.0;
    m.m_plus = 0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = detail::noncentral_chisq_with_count(2.0 * p.alpha()[i], p.lambda()[i], rng, m.m[i]);
      m.m_plus += m.m[i];
      total += y[i];
    }
    std::vector<double> x(p.dim());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = y[i] / total;
    if (SimplexPoint::admissible(x)) return {SimplexPoint(std::move(x)), total, std::move(m)};
    if (diag) ++diag->boundary_retries;
    if (attempt >= detail::kMaxBoundaryRetries)
      throw std::runtime_error("sample_ncdir_definition: repeated draws on the simplex boundary");
  }
}

inline SimplexPoint sample_ncdir_definition(const NcDirParams& p, Rng& rng,
                                            SamplerDiagnostics* diag = nullptr) {
  return sample_ncdir_definition_traced(p, rng, diag).x;
}

/// M ~ Multi-Poisson(lambda/2), then X' | M ~ Dir^D(alpha + M).
inline SimplexPoint sample_ncdir_mixture(const NcDirParams& p, Rng& rng,
                                         SamplerDiagnostics* diag = nullptr) {
  return detail::retry_until_interior(
      [&] {
        const MultiPoissonDraw m = sample_multipoisson(p.lambda(), rng);
        std::vector<double> shape(p.dim() + 1);
        for (std::size_t i = 0; i < shape.size(); ++i)
          shape[i] = p.alpha()[i] + static_cast<double>(m.m[i]);
        std::vector<double> full = dirichlet_variate(shape, rng);
        full.pop_back();
        return full;
      },
      diag);
}

/// Stochastic convex combination route with its latent weight and M.
struct RepresentationDraw {
  SimplexPoint x;
  double weight;  // X'_2 ~ Beta(alpha+, M+) given M+, 1 when M+ = 0
  MultiPoissonDraw m;
};

/// X' = W X + (1 - W) X_pnc with X ~ Dir^D(alpha), W | M+ ~ Beta(alpha+, M+) and
/// X_pnc | M ~ Dir^D(M). Coordinates with M_i = 0 are exactly 0 in X_pnc, and
/// X_pnc is the zero vector when M+ = 0 (W = 1 then).
inline RepresentationDraw sample_ncdir_representation_traced(const NcDirParams& p, Rng& rng,
                                                             SamplerDiagnostics* diag = nullptr) {
  const std::size_t n = p.dim() + 1;
  for (std::size_t attempt = 0;; ++attempt) {
    MultiPoissonDraw m = sample_multipoisson(p.lambda(), rng);
    const std::vector<double> central = dirichlet_variate(p.alpha(), rng);
    double weight = 1.0;
    std::vector<double> pnc(n, 0.0);
    if (m.m_plus > 0) {
      weight = beta_variate(p.alpha_plus(), static_cast<double>(m.m_plus), rng);
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (m.m[i] > 0) {
          pnc[i] = gamma_variate(static_cast<double>(m.m[i]), 1.0, rng);
          total += pnc[i];
        }
      }
      for (double& v : pnc) v /= total;
    }
    std::vector<double> x(p.dim());
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = weight * central[i] + (1.0 - weight) * pnc[i];
    if (SimplexPoint::admissible(x)) return {SimplexPoint(std::move(x)), weight, std::move(m)};
    if (diag) ++diag->boundary_retries;
    if (attempt >= detail::kMaxBoundaryRetries)
      throw std::runtime_error(
          "sample_ncdir_representation: repeated draws on the simplex boundary");
  }
}

inline SimplexPoint sample_ncdir_representation(const NcDirParams& p, Rng& rng,
                                                SamplerDiagnostics* diag = nullptr) {
  return sample_ncdir_representation_traced(p, rng, diag).x;
}

/// NcDir^D density as the Multi-Poisson(lambda/2)-weighted series of
/// Dir^D(alpha + j) densities, summed layer by layer in |j|. `terms` counts
/// the multi-indices evaluated.
inline SeriesSum ncdir_density_mixture(const NcDirParams& p, const SimplexPoint& x,
                                       const SeriesControl& ctl = {}) {
  ctl.validate();
  detail::require_dims(p.dim() + 1, x, "ncdir_density_mixture");
  const std::size_t k = p.dim() + 1;
  const auto alpha = p.alpha();
  const auto lambda = p.lambda();

  std::vector<double> logx(k);
  for (std::size_t i = 0; i < k; ++i) logx[i] = std::log(i + 1 < k ? x[i] : x.remainder());

  // Per-axis tables indexed by j_i, grown as layers are added.
  std::vector<std::vector<double>> log_weight(k);  // log Poisson pmf + log gamma + power
  std::vector<std::size_t> cap(k);
  for (std::size_t i = 0; i < k; ++i) cap[i] = lambda[i] > 0.0 ? SIZE_MAX : 0;
  auto extend = [&](std::size_t n) {
    for (std::size_t i = 0; i < k; ++i) {
      if (log_weight[i].size() > n || n > cap[i]) continue;
      const double h = 0.5 * lambda[i];
      const double nn = static_cast<double>(n);
      const double log_pois = (n == 0 ? 0.0 : nn * std::log(h)) - h - std::lgamma(nn + 1.0);
      log_weight[i].push_back(log_pois - std::lgamma(alpha[i] + nn) +
                              (alpha[i] + nn - 1.0) * logx[i]);
    }
  };

  double sum = 0.0;
  std::size_t terms = 0;
  GuardCounter guard(ctl);
  std::vector<std::size_t> j(k);
  for (std::size_t n = 0;; ++n) {
    if (n >= ctl.max_terms) throw NonConvergent("ncdir_density_mixture", n, sum, 0.0);
    extend(n);
    const double log_norm = std::lgamma(p.alpha_plus() + static_cast<double>(n));
    double layer = 0.0;
    detail::for_each_composition(n, cap, j, 0, [&](const std::vector<std::size_t>& idx) {
      double lw = 0.0;
      for (std::size_t i = 0; i < k; ++i) lw += log_weight[i][idx[i]];
      layer += std::exp(lw + log_norm);
      ++terms;
    });
    sum += layer;
    if (n > 0 && guard.accept(layer, sum)) return {sum, terms};
  }
}

/// NcDir^D density as Dir^D(x; alpha) e^{-lambda+/2} Psi2^{(D+1)}[alpha+; alpha; lambda_i x_i / 2].
/// `terms` counts Psi2 layers.
inline SeriesSum ncdir_density_perturbation(const NcDirParams& p, const SimplexPoint& x,
                                            const SeriesControl& ctl = {}) {
  detail::require_dims(p.dim() + 1, x, "ncdir_density_perturbation");
  const std::size_t k = p.dim() + 1;
  std::vector<double> args(k);
  for (std::size_t i = 0; i < k; ++i)
    args[i] = 0.5 * p.lambda()[i] * (i + 1 < k ? x[i] : x.remainder());
  const SeriesSum psi = humbert_psi2_series(p.alpha_plus(), p.alpha(), args, ctl);
  const double value =
      std::exp(detail::log_dirichlet_density(p.alpha(), x) - 0.5 * p.lambda_plus()) * psi.value;
  return {value, psi.terms};
}

/// Multinomial^D(m_plus; lambda_1/lambda+, ..., lambda_D/lambda+) mass at j
/// (j has D entries; the (D+1)-th cell receives m_plus - |j|).
inline double multipoisson_conditional_pmf(std::span<const double> lambda,
                                           std::span<const std::uint64_t> j,
                                           std::uint64_t m_plus) {
  if (j.size() + 1 != lambda.size())
    throw std::invalid_argument("multipoisson_conditional_pmf: j needs D = lambda.size()-1 entries");
  const double lp = std::accumulate(lambda.begin(), lambda.end(), 0.0);
  if (!(lp > 0.0))
    throw std::domain_error("multipoisson_conditional_pmf: lambda+ must be > 0");
  std::uint64_t jp = 0;
  for (auto v : j) jp += v;
  if (jp > m_plus)
    throw std::domain_error("multipoisson_conditional_pmf: |j| exceeds m_plus");

  double log_mass = std::lgamma(static_cast<double>(m_plus) + 1.0);
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const std::uint64_t cell = i < j.size() ? j[i] : m_plus - jp;
    if (cell == 0) continue;
    if (lambda[i] == 0.0) return 0.0;
    const double c = static_cast<double>(cell);
    log_mass += c * std::log(lambda[i] / lp) - std::lgamma(c + 1.0);
  }
  return std::exp(log_mass);
}

/// Upper bound on the enumeration size of the conditional density.
inline constexpr std::size_t kMaxConditionalTerms = 10'000;

/// Density of X' given M+ = m_plus: the finite mixture over |j| <= m_plus of
/// Multinomial weights times Dir^D(alpha_1+j_1, ..., alpha_D+j_D, alpha_{D+1}+m_plus-|j|).
inline double ncdir_conditional_density_mplus(const NcDirParams& p, const SimplexPoint& x,
                                              std::uint64_t m_plus) {
  detail::require_dims(p.dim() + 1, x, "ncdir_conditional_density_mplus");
  if (m_plus == 0) return dirichlet_density(p.alpha(), x);
  if (!(p.lambda_plus() > 0.0))
    throw std::domain_error(
        "ncdir_conditional_density_mplus: lambda+ = 0 makes M+ > 0 a null event");
  const std::size_t d = p.dim();
  // number of j in N^D with |j| <= m is C(m + D, D)
  double count = 1.0;
  for (std::size_t i = 1; i <= d; ++i)
    count = count * static_cast<double>(m_plus + i) / static_cast<double>(i);
  if (count > static_cast<double>(kMaxConditionalTerms))
    throw std::length_error("ncdir_conditional_density_mplus: enumeration of " +
                            std::to_string(static_cast<long long>(count)) +
                            " terms exceeds the cap");

  std::vector<std::uint64_t> j(d, 0);
  std::vector<double> shape(d + 1);
  double total = 0.0;
  // odometer over j with |j| <= m_plus
  for (;;) {
    std::uint64_t jp = 0;
    for (auto v : j) jp += v;
    const double w = multipoisson_conditional_pmf(p.lambda(), j, m_plus);
    if (w > 0.0) {
      for (std::size_t i = 0; i < d; ++i) shape[i] = p.alpha()[i] + static_cast<double>(j[i]);
      shape[d] = p.alpha()[d] + static_cast<double>(m_plus - jp);
      total += w * dirichlet_density(shape, x);
    }
    std::size_t pos = 0;
    while (pos < d) {
      ++j[pos];
      std::uint64_t s = 0;
      for (auto v : j) s += v;
      if (s <= m_plus) break;
      j[pos] = 0;
      ++pos;
    }
    if (pos == d) break;
  }
  return total;
}

/// Parameters of the bivariate marginal (X'_i, X'_j), 0-based coordinate indices < D.
inline NcDirParams marginal_2d(const NcDirParams& p, std::size_t i, std::size_t j) {
  if (p.dim() < 2) throw std::invalid_argument("marginal_2d: requires D >= 2");
  if (i >= p.dim() || j >= p.dim())
    throw std::out_of_range("marginal_2d: coordinate index out of range");
  if (i == j) throw std::invalid_argument("marginal_2d: indices must differ");
  const auto a = p.alpha();
  const auto l = p.lambda();
  double a_rest = 0.0, l_rest = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (k == i || k == j) continue;
    a_rest += a[k];
    l_rest += l[k];
  }
  return NcDirParams({a[i], a[j], a_rest}, {l[i], l[j], l_rest});
}

}  // namespace ncdir
