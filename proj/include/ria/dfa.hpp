#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace ria {

struct DfaResult {
  std::vector<std::size_t> window_sizes;
  std::vector<double> fluctuations;
  double alpha = 0.0;
  double alpha_se = 0.0;
  std::pair<std::size_t, std::size_t> fit_range = {0, 0};
};

// 20 logarithmically spaced window sizes from 8 to n/4 (deduplicated).
std::vector<std::size_t> default_window_sizes(std::size_t n);

// DFA-1: profile = cumulative sum of the demeaned series; non-overlapping
// windows from the front and from the back; per-window least-squares line
// removed; F(l) = RMS of residuals over all windows. Parallel over window
// sizes, identical to sequential evaluation.
DfaResult dfa_fluctuation(const std::vector<double>& series,
                          const std::vector<std::size_t>& window_sizes);

// Least-squares slope of log F(l) vs log l over window sizes within
// [fit_range.first, fit_range.second]. Returns alpha and fills alpha_se and
// fit_range on the result.
double fit_dfa_exponent(DfaResult& result,
                        std::pair<std::size_t, std::size_t> fit_range);

// Convenience: fluctuations on the default grid plus an exponent fit over
// [16, n/8].
DfaResult dfa_analyze(const std::vector<double>& series);

namespace serial {
// Plain reference DFA kept for testing and the benchmark target.
DfaResult dfa_fluctuation(const std::vector<double>& series,
                          const std::vector<std::size_t>& window_sizes);
}  // namespace serial

}  // namespace ria
