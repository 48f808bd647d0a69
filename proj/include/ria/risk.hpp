#pragma once

#include <cstdint>
#include <vector>

#include "ria/events.hpp"
#include "ria/powerlaw.hpp"
#include "ria/series.hpp"

namespace ria {

// W_q(dt | t): probability the next event arrives within dt given t minutes
// have elapsed since the last one.
struct HazardCurve {
  std::vector<double> t_values;
  std::vector<double> w_empirical;
  std::vector<double> w_theoretical;
  std::vector<char> valid;  // theoretical curve: t >= x_min * <tau>
  std::int64_t delta_t = 0;
};

// Return-tail fit p(r) = k |r|^-(beta+1) for |r| >= cutoff (cutoff = 2).
struct TailFit {
  double beta = 0.0;
  double k = 0.0;
  double cutoff = 2.0;
  std::size_t n_tail = 0;
  std::size_t n_total = 0;
};

enum class TailSide { negative, positive };

// Parameters of <tau|tau0>/<tau> = [1 + gamma x^-mu] x^nu on
// x = tau0/<tau> in (0.1, 10].
struct ConditionalMeanFit {
  double gamma = 0.0;
  double mu = 0.0;
  double nu = 0.0;
  double residual_rms = 0.0;
  double region_lo = 0.1;
  double region_hi = 10.0;
};

struct LossSurface {
  enum class Kind { empirical, theoretical };
  std::vector<double> q_grid;     // negative thresholds
  std::vector<double> tau0_grid;  // scaled tau0 values
  std::vector<double> p_star;     // row-major, [iq * tau0_grid.size() + it]
  std::vector<char> missing;
  Kind kind = Kind::theoretical;

  double at(std::size_t iq, std::size_t it) const {
    return p_star[iq * tau0_grid.size() + it];
  }
  bool is_missing(std::size_t iq, std::size_t it) const {
    return missing[iq * tau0_grid.size() + it] != 0;
  }
};

// Empirical W(t) = #{t < tau <= t+dt} / #{tau > t}; grid points with an
// empty survivor set are omitted.
HazardCurve hazard_empirical(const RecurrenceIntervalSeries& intervals,
                             std::int64_t delta_t,
                             const std::vector<double>& t_grid);

// W = (delta-1) dt / t clamped to [0,1]; points below x_min*<tau> are
// emitted with valid = 0.
HazardCurve hazard_theoretical(const PowerLawFit& fit, double mean_interval,
                               std::int64_t delta_t,
                               const std::vector<double>& t_grid);

// Hill estimator with fixed cutoff |r| >= 2; k from tail-mass matching.
TailFit fit_return_tail(const NormalizedReturnSeries& returns, TailSide side);

// p* = (k/beta) |q|^-beta for q <= -cutoff.
double loss_probability(const TailFit& tail, double q);

// Fit the conditional-mean model to log-binned (tau0, tau) successor pairs.
ConditionalMeanFit fit_conditional_mean(const std::vector<IntervalPair>& pairs,
                                        double mean_interval,
                                        int n_bins_per_decade = 10);

// Same fit on already-scaled (tau0/<tau>, tau/<tau>) pairs, e.g. pooled
// across thresholds.
ConditionalMeanFit fit_conditional_mean_scaled(
    const std::vector<std::pair<double, double>>& scaled_pairs,
    int n_bins_per_decade = 10);

// Direct curve fit on (x, y) points; used by the pair-level overload and by
// tests that synthesize the curve.
ConditionalMeanFit fit_conditional_mean_curve(const std::vector<double>& xs,
                                              const std::vector<double>& ys);

double conditional_mean_model(const ConditionalMeanFit& fit, double x);

// Theoretical surface: <tau>(q) = (beta/k) |q|^beta from the tail fit,
// p*(q, tau0) = 1 / (<tau>(q) * model(tau0)). Cells with tau0 outside the
// fitted region are marked missing rather than extrapolated.
LossSurface conditional_loss_surface(const TailFit& tail,
                                     const ConditionalMeanFit& cmf,
                                     const std::vector<double>& q_grid,
                                     const std::vector<double>& tau0_grid);

// Empirical surface: per q, extract intervals and estimate p* = 1/<tau|tau0>
// per tau0 cell (cell edges at geometric midpoints of the grid).
LossSurface empirical_loss_surface(const NormalizedReturnSeries& returns,
                                   const std::vector<double>& q_grid,
                                   const std::vector<double>& tau0_grid);

}  // namespace ria
