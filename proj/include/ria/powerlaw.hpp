#pragma once

#include <cstdint>
#include <vector>

#include "ria/events.hpp"

namespace ria {

// Tail fit f(x) = c x^-delta for x >= x_min. c is fixed by tail-mass
// matching: c = (n_tail/n_total) (delta-1) x_min^(delta-1).
struct PowerLawFit {
  double x_min = 0.0;
  double delta = 0.0;
  double delta_se = 0.0;
  double c = 0.0;
  double ks = 0.0;
  std::size_t n_tail = 0;
  std::size_t n_total = 0;
};

struct GofReport {
  double ks = 0.0;
  double p_ks = 0.0;
  double ksw = 0.0;
  double p_ksw = 0.0;
  double w2 = 0.0;
  bool cvm_reject_1pct = false;
  int n_bootstrap = 0;
};

// 1% critical value of the Cramer-von Mises W^2 statistic.
inline constexpr double kCvmCritical1pct = 0.743;

// Concatenate x = tau/<tau> over all threshold sets, each scaled by its own
// mean interval.
std::vector<double> aggregate_scaled_samples(
    const std::vector<RecurrenceIntervalSeries>& interval_sets);

// Continuous MLE with x_min chosen by minimizing the KS distance over
// candidate x_min values (unique sample values, capped at the 95th
// percentile). Among candidates whose KS is within a one-standard-error
// noise band of the minimum, the largest tail wins; this stops the bound
// from drifting upward on clean data where deep-tail KS values are pure
// noise. OpenMP-parallel candidate scan; large inputs use a coarse quantile
// scan refined around the selected coarse candidate.
PowerLawFit fit_power_law(const std::vector<double>& x);

// Closed-form continuous MLE for a fixed lower bound:
// delta = 1 + n / sum(ln(x_i / x_min)).
double mle_exponent(const std::vector<double>& x_tail, double x_min);

// Sup-distance between the tail empirical CDF (both step sides) and the
// fitted CDF F_PL(x) = 1 - (x/x_min)^(1-delta).
double ks_statistic(const std::vector<double>& x_tail, const PowerLawFit& fit);

// Variance-weighted sup-distance |F - F_PL| / sqrt(F_PL (1 - F_PL)),
// evaluated where F_PL is inside (eps, 1-eps), eps = 1e-12.
double ksw_statistic(const std::vector<double>& x_tail, const PowerLawFit& fit);

// W^2 via the probability-integral transform u_i = F_PL(x_i):
// W^2 = 1/(12N) + sum_i (u_(i) - (2i-1)/(2N))^2.
double cvm_statistic(const std::vector<double>& x_tail, const PowerLawFit& fit);

// Bootstrap p-values per Clauset-Shalizi-Newman: each replica redraws n_tail
// samples from F_PL, refits delta (x_min held fixed), and is scored against
// its own fit. Deterministic per seed, independent of thread count.
GofReport bootstrap_gof(const std::vector<double>& x_tail,
                        const PowerLawFit& fit, int n_bootstrap,
                        std::uint64_t seed);

// Inverse-transform draws x = x_min (1-u)^(-1/(delta-1)).
std::vector<double> sample_power_law(const PowerLawFit& fit, std::size_t n,
                                     std::uint64_t seed);

namespace serial {
// Plain single-pass reference implementations kept for testing and the
// benchmark target. The reference fit scans every candidate without the
// coarse/refine shortcut; the reference bootstrap samples and sorts each
// replica directly.
PowerLawFit fit_power_law(const std::vector<double>& x);
GofReport bootstrap_gof(const std::vector<double>& x_tail,
                        const PowerLawFit& fit, int n_bootstrap,
                        std::uint64_t seed);
}  // namespace serial

}  // namespace ria
