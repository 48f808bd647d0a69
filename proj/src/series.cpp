#include "ria/series.hpp"

#include <cmath>
#include <string>

#include "ria/error.hpp"

namespace ria {

ReturnSeries compute_log_returns(const PriceSeries& prices,
                                 bool keep_overnight) {
  const std::size_t n = prices.size();
  if (n < 2) throw DataError("insufficient data: need at least 2 observations");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(prices.prices[i] > 0.0))
      throw DataError("invalid price at index " + std::to_string(i));
  }

  ReturnSeries out;
  out.values.reserve(n - 1);
  out.alignment.reserve(n - 1);
  std::size_t produced = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (!keep_overnight && prices.session_ids[i] != prices.session_ids[i - 1])
      continue;
    out.values.push_back(std::log(prices.prices[i]) -
                         std::log(prices.prices[i - 1]));
    out.alignment.push_back(i);
    ++produced;
  }
  if (produced == 0)
    throw DataError("insufficient data: no session with 2+ observations");
  return out;
}

NormalizedReturnSeries normalize_returns(const ReturnSeries& returns) {
  const std::size_t n = returns.values.size();
  if (n < 2) throw DataError("insufficient data: need at least 2 returns");

  // Population moments, numerator left as-is.
  double sum = 0.0, sum2 = 0.0;
  for (double v : returns.values) {
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / static_cast<double>(n);
  const double var = sum2 / static_cast<double>(n) - mean * mean;
  if (!(var > 0.0)) throw DataError("degenerate series: zero variance");
  const double sd = std::sqrt(var);

  NormalizedReturnSeries out;
  out.sd = sd;
  out.values.reserve(n);
  for (double v : returns.values) out.values.push_back(v / sd);
  return out;
}

}  // namespace ria
