#pragma once

#include <cstdint>
#include <vector>

#include "ria/series.hpp"

namespace ria {

// Threshold in units of the normalized-return standard deviation.
// q > 0 means events are r > q; q < 0 means events are r < q.
struct ThresholdSpec {
  double q = 0.0;

  bool is_event(double r) const { return q > 0.0 ? r > q : r < q; }
};

struct RecurrenceIntervalSeries {
  std::vector<std::int64_t> intervals;  // minutes between consecutive events
  std::size_t n_returns = 0;
  std::size_t n_events = 0;
  double mean_interval = 0.0;  // N / n_events
};

// Ascending-sorted intervals split into four equal-count bins; remainder goes
// to the earliest bins. bin_of[i] is the bin of intervals[i] in original order.
struct QuartilePartition {
  std::int64_t boundaries[3] = {0, 0, 0};  // max value of bins 0..2
  std::vector<int> bin_of;
};

// Successor pair: interval tau immediately following interval tau0.
struct IntervalPair {
  std::int64_t tau0 = 0;
  std::int64_t tau = 0;
};

RecurrenceIntervalSeries extract_intervals(const NormalizedReturnSeries& returns,
                                           const ThresholdSpec& spec);

// Variant that restarts interval counting at each session start, so no
// interval spans a session boundary. session_starts are return indices that
// open a new session (index 0 implied).
RecurrenceIntervalSeries extract_intervals_sessioned(
    const NormalizedReturnSeries& returns, const ThresholdSpec& spec,
    const std::vector<std::size_t>& session_starts);

QuartilePartition partition_quartiles(const RecurrenceIntervalSeries& intervals);

// Positions with r > 0 replaced by 0; the rest unchanged. DFA input for the
// negative-return-series experiment.
NormalizedReturnSeries mask_positive_returns(const NormalizedReturnSeries& returns);

// Adjacent (tau0, tau) pairs in time order; the last interval conditions
// nothing.
std::vector<IntervalPair> successor_pairs(const RecurrenceIntervalSeries& intervals);

}  // namespace ria
