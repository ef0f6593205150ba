#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace ncdir {

/// Truncation policy shared by every infinite-series evaluation.
///
/// A series is accepted as converged once `guard` consecutive terms each
/// satisfy |term| <= rel_tol * |partial sum| and do not grow. `max_terms`
/// bounds the work per summation index.
struct SeriesControl {
  double rel_tol = 1e-14;
  std::size_t max_terms = 10'000;
  std::size_t guard = 3;

  void validate() const {
    if (!(rel_tol > 0.0)) throw std::invalid_argument("SeriesControl: rel_tol must be > 0");
    if (max_terms < 1) throw std::invalid_argument("SeriesControl: max_terms must be >= 1");
    if (guard < 1) throw std::invalid_argument("SeriesControl: guard must be >= 1");
  }

  friend bool operator==(const SeriesControl&, const SeriesControl&) = default;
};

/// Incremental implementation of the guard stopping rule.
class GuardCounter {
 public:
  explicit GuardCounter(const SeriesControl& ctl) : ctl_(ctl) {}

  /// Feed the term just added to `sum`; returns true when the series may stop.
  bool accept(double term, double sum) {
    const double mag = std::abs(term);
    const bool small = mag <= ctl_.rel_tol * std::abs(sum);
    const bool shrinking = mag <= previous_;
    run_ = (small && shrinking) ? run_ + 1 : 0;
    previous_ = mag;
    return run_ >= ctl_.guard;
  }

 private:
  SeriesControl ctl_;
  std::size_t run_ = 0;
  double previous_ = INFINITY;
};

}  // namespace ncdir
