#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ncdir {

// A series hit its term budget before the stopping rule was satisfied.
class NonConvergent : public std::runtime_error {
 public:
  NonConvergent(const std::string& where, std::size_t terms, double partial_sum,
                double last_term)
      : std::runtime_error(where + ": no convergence after " + std::to_string(terms) +
                           " terms (partial sum " + std::to_string(partial_sum) +
                           ", last term " + std::to_string(last_term) + ")"),
        terms_(terms),
        partial_sum_(partial_sum),
        last_term_(last_term) {}

  std::size_t terms() const noexcept { return terms_; }
  double partial_sum() const noexcept { return partial_sum_; }
  double last_term() const noexcept { return last_term_; }

 private:
  std::size_t terms_;
  double partial_sum_;
  double last_term_;
};

// A series parameter makes a term undefined (e.g. a lower parameter at a pole).
class BadParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace ncdir
