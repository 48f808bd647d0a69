#include "ria/events.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "ria/error.hpp"

namespace ria {

RecurrenceIntervalSeries extract_intervals(const NormalizedReturnSeries& returns,
                                           const ThresholdSpec& spec) {
  if (returns.values.empty()) throw DataError("insufficient data: empty series");
  if (std::abs(spec.q) < 1.0)
    throw ConfigError("threshold magnitude must be >= 1");

  RecurrenceIntervalSeries out;
  out.n_returns = returns.values.size();
  // The first event opens counting; time before it is not an interval.
  std::size_t last_event = 0;
  bool seen_event = false;
  for (std::size_t i = 0; i < returns.values.size(); ++i) {
    if (!spec.is_event(returns.values[i])) continue;
    ++out.n_events;
    if (seen_event)
      out.intervals.push_back(static_cast<std::int64_t>(i - last_event));
    last_event = i;
    seen_event = true;
  }
  if (out.n_events < 2)
    throw DataError("insufficient events: found " +
                    std::to_string(out.n_events));
  out.mean_interval = static_cast<double>(out.n_returns) /
                      static_cast<double>(out.n_events);
  return out;
}

RecurrenceIntervalSeries extract_intervals_sessioned(
    const NormalizedReturnSeries& returns, const ThresholdSpec& spec,
    const std::vector<std::size_t>& session_starts) {
  if (returns.values.empty()) throw DataError("insufficient data: empty series");
  if (std::abs(spec.q) < 1.0)
    throw ConfigError("threshold magnitude must be >= 1");

  RecurrenceIntervalSeries out;
  out.n_returns = returns.values.size();
  std::size_t next_start = 0;
  std::size_t last_event = 0;
  bool seen_event = false;
  for (std::size_t i = 0; i < returns.values.size(); ++i) {
    while (next_start < session_starts.size() && session_starts[next_start] <= i) {
      if (session_starts[next_start] == i) seen_event = false;
      ++next_start;
    }
    if (!spec.is_event(returns.values[i])) continue;
    ++out.n_events;
    if (seen_event)
      out.intervals.push_back(static_cast<std::int64_t>(i - last_event));
    last_event = i;
    seen_event = true;
  }
  if (out.n_events < 2)
    throw DataError("insufficient events: found " +
                    std::to_string(out.n_events));
  out.mean_interval = static_cast<double>(out.n_returns) /
                      static_cast<double>(out.n_events);
  return out;
}

QuartilePartition partition_quartiles(const RecurrenceIntervalSeries& intervals) {
  const std::size_t n = intervals.intervals.size();
  if (n < 8) throw DataError("too few intervals for quartile partition");

  // Stable sort of positions: ties at block boundaries break by sorted
  // position, which stable ordering makes deterministic.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return intervals.intervals[a] < intervals.intervals[b];
                   });

  // Block sizes as equal as possible, remainder to the earliest bins.
  const std::size_t base = n / 4, rem = n % 4;
  QuartilePartition part;
  part.bin_of.assign(n, 0);
  std::size_t pos = 0;
  for (int b = 0; b < 4; ++b) {
    const std::size_t sz = base + (static_cast<std::size_t>(b) < rem ? 1 : 0);
    for (std::size_t k = 0; k < sz; ++k, ++pos)
      part.bin_of[order[pos]] = b;
    if (b < 3) part.boundaries[b] = intervals.intervals[order[pos - 1]];
  }
  return part;
}

NormalizedReturnSeries mask_positive_returns(const NormalizedReturnSeries& returns) {
  if (returns.values.empty()) throw DataError("insufficient data: empty series");
  NormalizedReturnSeries out = returns;
  for (double& v : out.values)
    if (v > 0.0) v = 0.0;
  return out;
}

std::vector<IntervalPair> successor_pairs(const RecurrenceIntervalSeries& intervals) {
  std::vector<IntervalPair> pairs;
  if (intervals.intervals.size() < 2) return pairs;
  pairs.reserve(intervals.intervals.size() - 1);
  for (std::size_t i = 0; i + 1 < intervals.intervals.size(); ++i)
    pairs.push_back({intervals.intervals[i], intervals.intervals[i + 1]});
  return pairs;
}

}  // namespace ria
