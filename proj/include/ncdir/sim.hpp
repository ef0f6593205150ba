#pragma once

// Replicated Monte-Carlo validation of the finite-sum moments and the timing
// comparison of the finite sum against the doubly infinite 2F2 series.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <thread>
#include <vector>

#include "ncdir/dist.hpp"
#include "ncdir/moments.hpp"
#include "ncdir/rng.hpp"
#include "ncdir/series_control.hpp"
#include "ncdir/stats.hpp"

namespace ncdir {

/// The four parameter rows (alpha_1, alpha_2, alpha_3, lambda_1, lambda_2, lambda_3)
/// of the reference validation study.
inline std::vector<NcDirParams> reference_param_sets() {
  return {
      NcDirParams({0.5, 0.6, 0.4}, {1.7, 6.4, 3.8}),
      NcDirParams({0.2, 0.3, 1.6}, {1.3, 5.5, 4.2}),
      NcDirParams({1.0, 1.4, 1.0}, {4.8, 1.9, 1.5}),
      NcDirParams({1.7, 3.1, 2.4}, {2.9, 3.7, 0.8}),
  };
}

inline std::vector<MomentOrder> reference_orders() { return {{1, 1}, {1, 2}, {2, 1}, {2, 2}}; }

struct ValidationConfig {
  std::size_t n_series = 30;
  std::size_t n_draws_per_series = 10'000;
  std::vector<MomentOrder> orders = reference_orders();
  std::vector<NcDirParams> param_sets = reference_param_sets();
  RngSeed seed{20240521};
  double alpha_level = 0.05;
  SeriesControl ctl{};
  std::size_t threads = 0;  // 0: hardware concurrency

  void validate() const {
    if (n_series < 2) throw std::invalid_argument("ValidationConfig: n_series must be >= 2");
    if (n_draws_per_series < 1)
      throw std::invalid_argument("ValidationConfig: n_draws_per_series must be >= 1");
    if (!(alpha_level > 0.0 && alpha_level < 1.0))
      throw std::invalid_argument("ValidationConfig: alpha_level must be in (0, 1)");
    for (const auto& p : param_sets) {
      if (p.dim() != 2) throw std::invalid_argument("ValidationConfig: parameter rows need D = 2");
    }
    ctl.validate();
  }
};

enum class Tail { TwoTailed, OneTailedGeq };

constexpr std::string_view to_string(Tail t) noexcept {
  return t == Tail::TwoTailed ? "two-tailed" : "one-tailed-geq";
}

struct ZTestReport {
  NcDirParams param_set;
  MomentOrder order;
  double target_mu = 0.0;
  double sample_mean = 0.0;
  double sample_sd = 0.0;
  double z_stat = 0.0;
  double p_value = 1.0;
  Tail tail = Tail::TwoTailed;
  std::size_t n_series = 0;

  bool rejected(double level) const noexcept { return p_value <= level; }
};

/// Seed of series `series` within parameter row `row`:
/// derive_seed(derive_seed(master, row), series).
inline std::uint64_t series_seed(RngSeed master, std::size_t row, std::size_t series) {
  return derive_seed(derive_seed(master.value, row), series);
}

namespace detail {

// Runs job(i) for i in [0, count) on up to `threads` workers.
template <class Job>
void parallel_for(std::size_t count, std::size_t threads, Job&& job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          if (failed) return;
          try {
            job(i);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
            return;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// For every (parameter row, order): n_series independent series of
/// n_draws_per_series definition-route draws, the descriptive mixed moment of
/// each series, and a two-tailed Z test of its mean against the finite-sum
/// moment. All orders of a row share the same draws. Reports are ordered by
/// row, then by order; results are bit-identical for a given config.
inline std::vector<ZTestReport> run_validation(const ValidationConfig& cfg) {
  cfg.validate();
  const std::size_t rows = cfg.param_sets.size();
  const std::size_t n_orders = cfg.orders.size();

  std::vector<std::vector<double>> targets(rows, std::vector<double>(n_orders));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t o = 0; o < n_orders; ++o)
      targets[r][o] = moment_finite_sum(cfg.param_sets[r], cfg.orders[o], cfg.ctl).value;

  // descriptive[(row * n_series + series) * n_orders + order]
  std::vector<double> descriptive(rows * cfg.n_series * n_orders);
  detail::parallel_for(rows * cfg.n_series, cfg.threads, [&](std::size_t job) {
    const std::size_t row = job / cfg.n_series;
    const std::size_t series = job % cfg.n_series;
    const NcDirParams& p = cfg.param_sets[row];
    Rng rng(series_seed(cfg.seed, row, series));
    std::vector<double> acc(n_orders, 0.0);
    for (std::size_t i = 0; i < cfg.n_draws_per_series; ++i) {
      const SimplexPoint x = sample_ncdir_definition(p, rng);
      for (std::size_t o = 0; o < n_orders; ++o)
        acc[o] += std::pow(x[0], cfg.orders[o].r1) * std::pow(x[1], cfg.orders[o].r2);
    }
    for (std::size_t o = 0; o < n_orders; ++o)
      descriptive[job * n_orders + o] = acc[o] / static_cast<double>(cfg.n_draws_per_series);
  });

  std::vector<ZTestReport> reports;
  reports.reserve(rows * n_orders);
  std::vector<double> column(cfg.n_series);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t o = 0; o < n_orders; ++o) {
      for (std::size_t s = 0; s < cfg.n_series; ++s)
        column[s] = descriptive[(r * cfg.n_series + s) * n_orders + o];
      const double m = stats::mean(column);
      const double sd = stats::sample_sd(column);
      const double mu = targets[r][o];
      reports.push_back({cfg.param_sets[r], cfg.orders[o], mu, m, sd,
                         stats::z_statistic(m, sd, cfg.n_series, mu),
                         stats::two_tailed_z(m, sd, cfg.n_series, mu), Tail::TwoTailed,
                         cfg.n_series});
    }
  }
  return reports;
}

struct TimingReport {
  NcDirParams param_set;
  MomentMethod method = MomentMethod::FiniteSum;
  double mean_seconds = 0.0;
  double sd_seconds = 0.0;
  double median_seconds = 0.0;
  std::size_t n_reps = 0;
  double p_value_noninferiority = 1.0;
  std::vector<double> values;  // moment per order from the final repetition
};

/// Speedup mean(HypergeoSeries) / mean(FiniteSum) for a pair of reports of one row.
inline double speedup(const TimingReport& finite, const TimingReport& series) {
  return series.mean_seconds / finite.mean_seconds;
}

/// Relative tolerance of the optional agreement check in run_timing.
inline constexpr double kTimingAgreementTol = 1e-9;

/// Wall time to compute every order by the finite sum and by the 2F2 series,
/// n_reps times per parameter row, strictly sequentially. Returns two reports
/// per row (FiniteSum, then HypergeoSeries) sharing the one-tailed p-value of
/// H0: mu_Sum - mu_Series >= 0. Both methods use the same SeriesControl.
/// With `check_values` the two methods must agree to kTimingAgreementTol
/// before any timing starts.
inline std::vector<TimingReport> run_timing(const std::vector<NcDirParams>& param_sets,
                                            const std::vector<MomentOrder>& orders,
                                            std::size_t n_reps, const SeriesControl& ctl = {},
                                            bool check_values = false) {
  if (n_reps < 2) throw std::invalid_argument("run_timing: n_reps must be >= 2");
  ctl.validate();
  using clock = std::chrono::steady_clock;

  std::vector<TimingReport> out;
  for (const NcDirParams& p : param_sets) {
    if (check_values) {
      for (MomentOrder o : orders) {
        const double a = moment_finite_sum(p, o, ctl).value;
        const double b = moment_hypergeo_series(p, o, ctl).value;
        if (!(std::abs(a - b) <= kTimingAgreementTol * std::abs(a)))
          throw std::runtime_error("run_timing: finite sum and series disagree beyond 1e-9");
      }
    }
    std::vector<double> t_sum(n_reps), t_series(n_reps);
    std::vector<double> v_sum(orders.size()), v_series(orders.size());
    for (std::size_t rep = 0; rep < n_reps; ++rep) {
      auto start = clock::now();
      for (std::size_t o = 0; o < orders.size(); ++o)
        v_sum[o] = moment_finite_sum(p, orders[o], ctl).value;
      auto mid = clock::now();
      for (std::size_t o = 0; o < orders.size(); ++o)
        v_series[o] = moment_hypergeo_series(p, orders[o], ctl).value;
      auto stop = clock::now();
      t_sum[rep] = std::chrono::duration<double>(mid - start).count();
      t_series[rep] = std::chrono::duration<double>(stop - mid).count();
    }
    const double ms = stats::mean(t_sum), ss = stats::sample_sd(t_sum);
    const double mr = stats::mean(t_series), sr = stats::sample_sd(t_series);
    const double pv = stats::one_tailed_z_less(ms, ss, n_reps, mr, sr, n_reps);
    out.push_back({p, MomentMethod::FiniteSum, ms, ss, stats::median(t_sum), n_reps, pv, v_sum});
    out.push_back(
        {p, MomentMethod::HypergeoSeries, mr, sr, stats::median(t_series), n_reps, pv, v_series});
  }
  return out;
}

}  // namespace ncdir
