#include "ria/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ria/error.hpp"

namespace ria {

namespace {

std::int64_t grid_index(double x, int nbpd) {
  // Edges at 10^(k/nbpd); bin k covers [10^(k/nbpd), 10^((k+1)/nbpd)).
  return static_cast<std::int64_t>(
      std::floor(std::log10(x) * static_cast<double>(nbpd)));
}

}  // namespace

EmpiricalPdf log_binned_pdf(const std::vector<double>& samples, int nbpd) {
  if (nbpd < 1) throw ConfigError("bins per decade must be >= 1");
  if (samples.size() < 2) throw DataError("too few samples for a density");

  std::map<std::int64_t, std::size_t> counts;
  for (double x : samples) {
    if (!(x > 0.0)) throw DataError("non-positive sample in log-binned pdf");
    ++counts[grid_index(x, nbpd)];
  }

  EmpiricalPdf pdf;
  pdf.n_samples = samples.size();
  pdf.bins_per_decade = nbpd;
  const double inv = 1.0 / static_cast<double>(nbpd);
  for (const auto& [k, c] : counts) {
    const double lo = std::pow(10.0, static_cast<double>(k) * inv);
    const double hi = std::pow(10.0, static_cast<double>(k + 1) * inv);
    pdf.bin_index.push_back(k);
    pdf.bin_centers.push_back(std::sqrt(lo * hi));
    pdf.bin_widths.push_back(hi - lo);
    pdf.counts.push_back(c);
    pdf.densities.push_back(static_cast<double>(c) /
                            (static_cast<double>(samples.size()) * (hi - lo)));
  }
  return pdf;
}

EmpiricalPdf scaled_pdf(const RecurrenceIntervalSeries& intervals,
                        int n_bins_per_decade) {
  std::vector<double> x;
  x.reserve(intervals.intervals.size());
  for (std::int64_t tau : intervals.intervals)
    x.push_back(static_cast<double>(tau) / intervals.mean_interval);
  return log_binned_pdf(x, n_bins_per_decade);
}

EmpiricalPdf conditional_pdf(const RecurrenceIntervalSeries& intervals,
                             const QuartilePartition& partition, int bin_index,
                             int n_bins_per_decade) {
  if (bin_index < 0 || bin_index > 3)
    throw ConfigError("quartile bin index must be in 0..3");
  std::vector<double> x;
  for (std::size_t i = 0; i + 1 < intervals.intervals.size(); ++i) {
    if (partition.bin_of[i] != bin_index) continue;
    x.push_back(static_cast<double>(intervals.intervals[i + 1]) /
                intervals.mean_interval);
  }
  if (x.size() < 2)
    throw DataError("empty conditional sample for quartile bin " +
                    std::to_string(bin_index));
  return log_binned_pdf(x, n_bins_per_decade);
}

}  // namespace ria
