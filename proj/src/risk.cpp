#include "ria/risk.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>

#include "ria/error.hpp"

namespace ria {

HazardCurve hazard_empirical(const RecurrenceIntervalSeries& intervals,
                             std::int64_t delta_t,
                             const std::vector<double>& t_grid) {
  if (intervals.intervals.empty()) throw DataError("no intervals");
  if (delta_t < 0) throw ConfigError("delta_t must be >= 0");
  std::vector<double> tau(intervals.intervals.begin(),
                          intervals.intervals.end());
  std::sort(tau.begin(), tau.end());
  const auto count_le = [&](double t) {
    return static_cast<double>(
        std::upper_bound(tau.begin(), tau.end(), t) - tau.begin());
  };
  const double n = static_cast<double>(tau.size());

  HazardCurve curve;
  curve.delta_t = delta_t;
  for (double t : t_grid) {
    const double survivors = n - count_le(t);
    if (survivors <= 0.0) continue;
    const double hits = count_le(t + static_cast<double>(delta_t)) - count_le(t);
    curve.t_values.push_back(t);
    curve.w_empirical.push_back(hits / survivors);
  }
  if (curve.t_values.empty())
    throw DataError("empty survivor set at every grid point");
  return curve;
}

HazardCurve hazard_theoretical(const PowerLawFit& fit, double mean_interval,
                               std::int64_t delta_t,
                               const std::vector<double>& t_grid) {
  HazardCurve curve;
  curve.delta_t = delta_t;
  const double t_valid = fit.x_min * mean_interval;
  for (double t : t_grid) {
    const double w =
        (fit.delta - 1.0) * static_cast<double>(delta_t) / t;
    curve.t_values.push_back(t);
    curve.w_theoretical.push_back(std::clamp(w, 0.0, 1.0));
    curve.valid.push_back(t >= t_valid ? 1 : 0);
  }
  return curve;
}

TailFit fit_return_tail(const NormalizedReturnSeries& returns, TailSide side) {
  constexpr double kCutoff = 2.0;
  TailFit fit;
  fit.cutoff = kCutoff;
  fit.n_total = returns.values.size();

  double sum_ln = 0.0;
  for (double r : returns.values) {
    const double y = side == TailSide::negative ? -r : r;
    if (y < kCutoff) continue;
    ++fit.n_tail;
    sum_ln += std::log(y / kCutoff);
  }
  if (fit.n_tail < 500)
    throw DataError("thin tail: only " + std::to_string(fit.n_tail) +
                    " samples beyond |r| >= 2");
  fit.beta = static_cast<double>(fit.n_tail) / sum_ln;
  const double tail_frac =
      static_cast<double>(fit.n_tail) / static_cast<double>(fit.n_total);
  fit.k = tail_frac * fit.beta * std::pow(kCutoff, fit.beta);
  return fit;
}

double loss_probability(const TailFit& tail, double q) {
  if (q > -tail.cutoff)
    throw ConfigError("outside tail region: q must be <= -" +
                      std::to_string(tail.cutoff));
  return tail.k / tail.beta * std::pow(-q, -tail.beta);
}

double conditional_mean_model(const ConditionalMeanFit& fit, double x) {
  return (1.0 + fit.gamma * std::pow(x, -fit.mu)) * std::pow(x, fit.nu);
}

namespace {

// Nelder-Mead on 3 parameters; plenty for a smooth 3-parameter residual.
struct SimplexResult {
  std::array<double, 3> p{};
  double value = std::numeric_limits<double>::infinity();
};

SimplexResult nelder_mead(
    const std::function<double(const std::array<double, 3>&)>& f,
    std::array<double, 3> start) {
  constexpr int kMaxIter = 2000;
  constexpr double kTol = 1e-12;
  std::array<std::array<double, 3>, 4> pts;
  std::array<double, 4> vals;
  pts[0] = start;
  for (int i = 0; i < 3; ++i) {
    pts[i + 1] = start;
    pts[i + 1][i] += start[i] != 0.0 ? 0.25 * std::abs(start[i]) : 0.1;
  }
  for (int i = 0; i < 4; ++i) vals[i] = f(pts[i]);

  std::array<int, 4> order = {0, 1, 2, 3};
  for (int iter = 0; iter < kMaxIter; ++iter) {
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return vals[a] < vals[b]; });
    if (vals[order[3]] - vals[order[0]] <
        kTol * (1.0 + std::abs(vals[order[0]])))
      break;

    std::array<double, 3> centroid = {0, 0, 0};
    for (int k = 0; k < 3; ++k)
      for (int d = 0; d < 3; ++d) centroid[d] += pts[order[k]][d] / 3.0;
    const int worst = order[3];

    const auto blend = [&](double coef) {
      std::array<double, 3> p;
      for (int d = 0; d < 3; ++d)
        p[d] = centroid[d] + coef * (pts[worst][d] - centroid[d]);
      return p;
    };

    const auto refl = blend(-1.0);
    const double fr = f(refl);
    if (fr < vals[order[0]]) {
      const auto exp_pt = blend(-2.0);
      const double fe = f(exp_pt);
      if (fe < fr) {
        pts[worst] = exp_pt;
        vals[worst] = fe;
      } else {
        pts[worst] = refl;
        vals[worst] = fr;
      }
    } else if (fr < vals[order[2]]) {
      pts[worst] = refl;
      vals[worst] = fr;
    } else {
      const auto con = blend(0.5);
      const double fc = f(con);
      if (fc < vals[worst]) {
        pts[worst] = con;
        vals[worst] = fc;
      } else {
        for (int k = 1; k < 4; ++k) {
          for (int d = 0; d < 3; ++d)
            pts[order[k]][d] =
                0.5 * (pts[order[k]][d] + pts[order[0]][d]);
          vals[order[k]] = f(pts[order[k]]);
        }
      }
    }
  }
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return vals[a] < vals[b]; });
  return {pts[order[0]], vals[order[0]]};
}

}  // namespace

ConditionalMeanFit fit_conditional_mean_curve(const std::vector<double>& xs,
                                              const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 10)
    throw DataError("need >= 10 populated bins for the conditional-mean fit");
  std::vector<double> lx(xs.size()), ly(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
      throw DataError("non-positive point in conditional-mean fit");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }

  // Log-space residuals; gamma kept non-negative through a soft barrier.
  const auto objective = [&](const std::array<double, 3>& p) {
    const double gamma = p[0], mu = p[1], nu = p[2];
    if (gamma < 0.0 || std::abs(mu) > 20.0 || std::abs(nu) > 20.0)
      return 1e30;
    double ssr = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      const double bracket = 1.0 + gamma * std::exp(-mu * lx[i]);
      if (!(bracket > 0.0)) return 1e30;
      const double r = ly[i] - (std::log(bracket) + nu * lx[i]);
      ssr += r * r;
    }
    return std::isfinite(ssr) ? ssr : 1e30;
  };

  SimplexResult best;
  for (double g0 : {0.1, 0.5, 1.0})
    for (double m0 : {0.5, 1.0, 2.0})
      for (double n0 : {0.1, 0.3, 0.6}) {
        const SimplexResult r = nelder_mead(objective, {g0, m0, n0});
        if (r.value < best.value) best = r;
      }
  if (!std::isfinite(best.value))
    throw NumericError("conditional-mean fit did not converge; best residual " +
                       std::to_string(best.value));

  ConditionalMeanFit fit;
  fit.gamma = best.p[0];
  fit.mu = best.p[1];
  fit.nu = best.p[2];
  fit.residual_rms = std::sqrt(best.value / static_cast<double>(xs.size()));
  return fit;
}

ConditionalMeanFit fit_conditional_mean(const std::vector<IntervalPair>& pairs,
                                        double mean_interval,
                                        int n_bins_per_decade) {
  std::vector<std::pair<double, double>> scaled;
  scaled.reserve(pairs.size());
  for (const auto& pr : pairs)
    scaled.emplace_back(static_cast<double>(pr.tau0) / mean_interval,
                        static_cast<double>(pr.tau) / mean_interval);
  return fit_conditional_mean_scaled(scaled, n_bins_per_decade);
}

ConditionalMeanFit fit_conditional_mean_scaled(
    const std::vector<std::pair<double, double>>& scaled_pairs,
    int n_bins_per_decade) {
  if (n_bins_per_decade < 1) throw ConfigError("bins per decade must be >= 1");
  // Anchored log bins of tau0/<tau>; mean successor interval per bin.
  std::map<std::int64_t, std::pair<double, std::size_t>> bins;
  for (const auto& [x0, y] : scaled_pairs) {
    const auto k = static_cast<std::int64_t>(std::floor(
        std::log10(x0) * static_cast<double>(n_bins_per_decade)));
    auto& [sum, cnt] = bins[k];
    sum += y;
    ++cnt;
  }

  std::vector<double> xs, ys;
  const double inv = 1.0 / static_cast<double>(n_bins_per_decade);
  for (const auto& [k, agg] : bins) {
    const double lo = std::pow(10.0, static_cast<double>(k) * inv);
    const double hi = std::pow(10.0, static_cast<double>(k + 1) * inv);
    const double center = std::sqrt(lo * hi);
    if (center <= 0.1 || center > 10.0) continue;
    xs.push_back(center);
    ys.push_back(agg.first / static_cast<double>(agg.second));
  }
  return fit_conditional_mean_curve(xs, ys);
}

LossSurface conditional_loss_surface(const TailFit& tail,
                                     const ConditionalMeanFit& cmf,
                                     const std::vector<double>& q_grid,
                                     const std::vector<double>& tau0_grid) {
  if (q_grid.empty() || tau0_grid.empty()) throw ConfigError("empty grid");
  LossSurface surf;
  surf.kind = LossSurface::Kind::theoretical;
  surf.q_grid = q_grid;
  surf.tau0_grid = tau0_grid;
  surf.p_star.assign(q_grid.size() * tau0_grid.size(), 0.0);
  surf.missing.assign(surf.p_star.size(), 0);

#pragma omp parallel for collapse(2) schedule(static)
  for (std::ptrdiff_t iq = 0; iq < static_cast<std::ptrdiff_t>(q_grid.size());
       ++iq) {
    for (std::ptrdiff_t it = 0;
         it < static_cast<std::ptrdiff_t>(tau0_grid.size()); ++it) {
      const std::size_t idx = static_cast<std::size_t>(iq) * tau0_grid.size() +
                              static_cast<std::size_t>(it);
      const double x0 = tau0_grid[static_cast<std::size_t>(it)];
      if (x0 <= cmf.region_lo || x0 > cmf.region_hi) {
        surf.missing[idx] = 1;
        continue;
      }
      // <tau>(q) = 1 / p*(q) per the mean-interval identity.
      const double mean_tau =
          1.0 / loss_probability(tail, q_grid[static_cast<std::size_t>(iq)]);
      const double cond_mean = mean_tau * conditional_mean_model(cmf, x0);
      surf.p_star[idx] = std::clamp(1.0 / cond_mean, 0.0, 1.0);
    }
  }
  return surf;
}

LossSurface empirical_loss_surface(const NormalizedReturnSeries& returns,
                                   const std::vector<double>& q_grid,
                                   const std::vector<double>& tau0_grid) {
  if (q_grid.empty() || tau0_grid.empty()) throw ConfigError("empty grid");
  LossSurface surf;
  surf.kind = LossSurface::Kind::empirical;
  surf.q_grid = q_grid;
  surf.tau0_grid = tau0_grid;
  surf.p_star.assign(q_grid.size() * tau0_grid.size(), 0.0);
  surf.missing.assign(surf.p_star.size(), 1);

  // Cell edges at geometric midpoints of the scaled tau0 grid.
  const std::size_t nt = tau0_grid.size();
  std::vector<double> edges(nt + 1);
  edges[0] = 0.0;
  for (std::size_t i = 1; i < nt; ++i)
    edges[i] = std::sqrt(tau0_grid[i - 1] * tau0_grid[i]);
  edges[nt] = std::numeric_limits<double>::infinity();

  for (std::size_t iq = 0; iq < q_grid.size(); ++iq) {
    RecurrenceIntervalSeries intervals;
    try {
      intervals = extract_intervals(returns, ThresholdSpec{q_grid[iq]});
    } catch (const DataError&) {
      continue;  // too few events at this threshold: whole row missing
    }
    std::vector<double> sum(nt, 0.0);
    std::vector<std::size_t> cnt(nt, 0);
    for (const auto& pr : successor_pairs(intervals)) {
      const double x0 = static_cast<double>(pr.tau0) / intervals.mean_interval;
      const std::size_t cell = static_cast<std::size_t>(
          std::upper_bound(edges.begin(), edges.end(), x0) - edges.begin() - 1);
      sum[cell] += static_cast<double>(pr.tau);
      ++cnt[cell];
    }
    for (std::size_t it = 0; it < nt; ++it) {
      if (cnt[it] == 0) continue;
      const std::size_t idx = iq * nt + it;
      const double cond_mean = sum[it] / static_cast<double>(cnt[it]);
      surf.p_star[idx] = std::clamp(1.0 / cond_mean, 0.0, 1.0);
      surf.missing[idx] = 0;
    }
  }
  return surf;
}

}  // namespace ria
