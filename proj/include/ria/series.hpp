#pragma once

#include <cstdint>
#include <vector>

namespace ria {

// Timestamped price observations. Timestamps are minutes since epoch;
// session_ids tag the trading day each observation belongs to.
struct PriceSeries {
  std::vector<std::int64_t> timestamps;
  std::vector<double> prices;
  std::vector<std::int32_t> session_ids;

  std::size_t size() const { return prices.size(); }
};

// Log returns R(t) = ln Y(t) - ln Y(t-1). alignment[i] is the index of the
// price observation return i ends at.
struct ReturnSeries {
  std::vector<double> values;
  std::vector<std::size_t> alignment;
};

// Returns divided by their standard deviation (numerator not demeaned).
struct NormalizedReturnSeries {
  std::vector<double> values;
  double sd = 0.0;
};

// When keep_overnight is false the return spanning each session boundary is
// dropped, so the series restarts at every session.
ReturnSeries compute_log_returns(const PriceSeries& prices,
                                 bool keep_overnight = false);

NormalizedReturnSeries normalize_returns(const ReturnSeries& returns);

}  // namespace ria
