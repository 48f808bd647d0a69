#pragma once

#include <cstdint>
#include <vector>

#include "ria/events.hpp"

namespace ria {

// Log-binned empirical density in scaled units x = tau / <tau>. Bins live on
// a global anchored grid (edges at 10^(k / bins_per_decade)), so histograms
// of subsets share edges and mix exactly. Empty bins are omitted.
struct EmpiricalPdf {
  std::vector<std::int64_t> bin_index;  // grid index k of each retained bin
  std::vector<double> bin_centers;      // geometric mean of the bin edges
  std::vector<double> bin_widths;       // linear width (upper - lower edge)
  std::vector<double> densities;        // count / (n_samples * width)
  std::vector<std::size_t> counts;
  std::size_t n_samples = 0;
  int bins_per_decade = 10;
};

EmpiricalPdf scaled_pdf(const RecurrenceIntervalSeries& intervals,
                        int n_bins_per_decade = 10);

// PDF of intervals whose immediate predecessor falls in the given quartile
// bin of the partition.
EmpiricalPdf conditional_pdf(const RecurrenceIntervalSeries& intervals,
                             const QuartilePartition& partition, int bin_index,
                             int n_bins_per_decade = 10);

// Shared helper: log-binned density of arbitrary positive samples.
EmpiricalPdf log_binned_pdf(const std::vector<double>& samples,
                            int n_bins_per_decade);

}  // namespace ria
