#include "ria/powerlaw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ria/error.hpp"
#include "ria/rng.hpp"

namespace ria {

namespace {

struct Candidate {
  double ks = std::numeric_limits<double>::infinity();
  double delta = 0.0;
  std::size_t index = 0;  // start index of the tail in the sorted sample
  bool valid = false;
};

bool better(const Candidate& a, const Candidate& b) {
  if (!b.valid) return a.valid;
  if (!a.valid) return false;
  if (a.ks != b.ks) return a.ks < b.ks;
  return a.index < b.index;  // deterministic tie-break: smallest x_min
}

// Sampling noise floor of the KS distance for a tail of m points. Used as a
// one-standard-error band: raw argmin-KS drifts to spuriously high x_min on
// clean data because deep-tail KS values differ only by noise, so we keep the
// largest tail whose KS is within the band of the minimum.
double ks_noise_band(std::size_t m) {
  return 0.3 / std::sqrt(static_cast<double>(m));
}

Candidate select_candidate(const std::vector<Candidate>& all,
                           std::size_t n_total) {
  Candidate best;
  for (const auto& c : all)
    if (better(c, best)) best = c;
  if (!best.valid) return best;
  Candidate pick = best;
  for (const auto& c : all) {
    if (!c.valid || c.index >= pick.index) continue;
    const std::size_t m = n_total - c.index;
    if (c.ks <= best.ks + ks_noise_band(m)) pick = c;
  }
  return pick;
}

// MLE exponent and KS distance for the tail starting at sorted index i.
// suffix_ln[i] = sum of ln x[j] for j >= i.
Candidate evaluate_candidate(const std::vector<double>& x,
                             const std::vector<double>& ln_x,
                             const std::vector<double>& suffix_ln,
                             std::size_t i) {
  Candidate cand;
  cand.index = i;
  const std::size_t n = x.size();
  const std::size_t m = n - i;
  if (m < 10) return cand;
  const double ln_xmin = ln_x[i];
  const double denom = suffix_ln[i] - static_cast<double>(m) * ln_xmin;
  if (!(denom > 0.0)) return cand;
  const double delta = 1.0 + static_cast<double>(m) / denom;

  const double expo = 1.0 - delta;
  double ks = 0.0;
  for (std::size_t j = i; j < n; ++j) {
    const double fpl = 1.0 - std::exp(expo * (ln_x[j] - ln_xmin));
    const double lo = static_cast<double>(j - i) / static_cast<double>(m);
    const double hi = static_cast<double>(j - i + 1) / static_cast<double>(m);
    ks = std::max(ks, std::max(std::abs(fpl - lo), std::abs(hi - fpl)));
  }
  cand.ks = ks;
  cand.delta = delta;
  cand.valid = true;
  return cand;
}

std::vector<Candidate> scan_candidates(const std::vector<double>& x,
                                       const std::vector<double>& ln_x,
                                       const std::vector<double>& suffix_ln,
                                       const std::vector<std::size_t>& cands) {
  std::vector<Candidate> out(cands.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(cands.size()); ++c)
    out[static_cast<std::size_t>(c)] =
        evaluate_candidate(x, ln_x, suffix_ln, cands[c]);
  return out;
}

PowerLawFit finish_fit(const std::vector<double>& x, const Candidate& best) {
  PowerLawFit fit;
  fit.n_total = x.size();
  fit.n_tail = x.size() - best.index;
  fit.x_min = x[best.index];
  fit.delta = best.delta;
  fit.ks = best.ks;
  fit.delta_se = (best.delta - 1.0) / std::sqrt(static_cast<double>(fit.n_tail));
  const double tail_frac =
      static_cast<double>(fit.n_tail) / static_cast<double>(fit.n_total);
  fit.c = tail_frac * (fit.delta - 1.0) * std::pow(fit.x_min, fit.delta - 1.0);
  return fit;
}

// Candidate x_min values: first occurrence of each unique sample value, capped
// at the 95th percentile so the tail keeps at least 5% of the data.
std::vector<std::size_t> candidate_indices(const std::vector<double>& x) {
  const std::size_t n = x.size();
  const std::size_t cap = (19 * (n - 1)) / 20;  // index of the 95th percentile
  std::vector<std::size_t> cands;
  for (std::size_t i = 0; i <= cap; ++i) {
    if (i == 0 || x[i] != x[i - 1]) cands.push_back(i);
  }
  return cands;
}

void check_fit_input(const std::vector<double>& x) {
  if (x.size() < 50)
    throw DataError("too few samples for a power-law fit (need >= 50)");
  for (double v : x)
    if (!(v > 0.0)) throw DataError("non-positive sample in power-law fit");
}

}  // namespace

std::vector<double> aggregate_scaled_samples(
    const std::vector<RecurrenceIntervalSeries>& interval_sets) {
  std::vector<double> out;
  for (const auto& set : interval_sets) {
    if (set.intervals.empty()) throw DataError("empty interval set");
    for (std::int64_t tau : set.intervals)
      out.push_back(static_cast<double>(tau) / set.mean_interval);
  }
  return out;
}

PowerLawFit fit_power_law(const std::vector<double>& x_in) {
  check_fit_input(x_in);
  std::vector<double> x = x_in;
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();

  std::vector<double> ln_x(n), suffix_ln(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) ln_x[i] = std::log(x[i]);
  for (std::size_t i = n; i-- > 0;) suffix_ln[i] = suffix_ln[i + 1] + ln_x[i];

  const std::vector<std::size_t> cands = candidate_indices(x);

  Candidate best;
  constexpr std::size_t kFullScanLimit = 2048;
  constexpr std::size_t kCoarse = 512;
  if (cands.size() <= kFullScanLimit) {
    best = select_candidate(scan_candidates(x, ln_x, suffix_ln, cands), n);
  } else {
    // Coarse quantile scan, then exhaustive refinement between the coarse
    // neighbours of the selected coarse candidate.
    std::vector<std::size_t> coarse;
    coarse.reserve(kCoarse);
    std::vector<std::size_t> coarse_pos;
    for (std::size_t k = 0; k < kCoarse; ++k) {
      const std::size_t p = (k * (cands.size() - 1)) / (kCoarse - 1);
      if (!coarse_pos.empty() && coarse_pos.back() == p) continue;
      coarse_pos.push_back(p);
      coarse.push_back(cands[p]);
    }
    const std::vector<Candidate> coarse_all =
        scan_candidates(x, ln_x, suffix_ln, coarse);
    const Candidate coarse_best = select_candidate(coarse_all, n);
    if (!coarse_best.valid) throw NumericError("tail too thin at every x_min candidate");
    std::size_t bp = 0;
    for (std::size_t k = 0; k < coarse.size(); ++k)
      if (coarse[k] == coarse_best.index) bp = k;
    const std::size_t lo = bp > 0 ? coarse_pos[bp - 1] : 0;
    const std::size_t hi =
        bp + 1 < coarse_pos.size() ? coarse_pos[bp + 1] : cands.size() - 1;
    std::vector<std::size_t> refine(cands.begin() + static_cast<std::ptrdiff_t>(lo),
                                    cands.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    std::vector<Candidate> all = scan_candidates(x, ln_x, suffix_ln, refine);
    all.insert(all.end(), coarse_all.begin(), coarse_all.end());
    best = select_candidate(all, n);
  }
  if (!best.valid) throw NumericError("tail too thin at every x_min candidate");
  return finish_fit(x, best);
}

namespace serial {

PowerLawFit fit_power_law(const std::vector<double>& x_in) {
  check_fit_input(x_in);
  std::vector<double> x = x_in;
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();

  std::vector<double> ln_x(n), suffix_ln(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) ln_x[i] = std::log(x[i]);
  for (std::size_t i = n; i-- > 0;) suffix_ln[i] = suffix_ln[i + 1] + ln_x[i];

  std::vector<Candidate> all;
  for (std::size_t i : candidate_indices(x))
    all.push_back(evaluate_candidate(x, ln_x, suffix_ln, i));
  const Candidate best = select_candidate(all, n);
  if (!best.valid) throw NumericError("tail too thin at every x_min candidate");
  return finish_fit(x, best);
}

}  // namespace serial

namespace {

double power_law_cdf(double x, const PowerLawFit& fit) {
  return 1.0 - std::pow(x / fit.x_min, 1.0 - fit.delta);
}

std::vector<double> sorted_tail(const std::vector<double>& x_tail,
                                const PowerLawFit& fit) {
  if (x_tail.empty()) throw DataError("empty tail sample");
  std::vector<double> s = x_tail;
  std::sort(s.begin(), s.end());
  if (s.front() < fit.x_min * (1.0 - 1e-12))
    throw DataError("tail sample below x_min");
  return s;
}

}  // namespace

double mle_exponent(const std::vector<double>& x_tail, double x_min) {
  if (x_tail.empty()) throw DataError("empty tail sample");
  double sum_ln = 0.0;
  for (double v : x_tail) {
    if (v < x_min * (1.0 - 1e-12)) throw DataError("tail sample below x_min");
    sum_ln += std::log(v / x_min);
  }
  if (!(sum_ln > 0.0)) throw NumericError("degenerate tail: all samples at x_min");
  return 1.0 + static_cast<double>(x_tail.size()) / sum_ln;
}

double ks_statistic(const std::vector<double>& x_tail, const PowerLawFit& fit) {
  const std::vector<double> s = sorted_tail(x_tail, fit);
  const double n = static_cast<double>(s.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double fpl = power_law_cdf(s[i], fit);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    ks = std::max(ks, std::max(std::abs(fpl - lo), std::abs(hi - fpl)));
  }
  return ks;
}

double ksw_statistic(const std::vector<double>& x_tail, const PowerLawFit& fit) {
  constexpr double kEps = 1e-12;
  const std::vector<double> s = sorted_tail(x_tail, fit);
  const double n = static_cast<double>(s.size());
  double ksw = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double fpl = power_law_cdf(s[i], fit);
    if (fpl <= kEps || fpl >= 1.0 - kEps) continue;
    any = true;
    const double w = std::sqrt(fpl * (1.0 - fpl));
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    ksw = std::max(ksw, std::max(std::abs(fpl - lo), std::abs(hi - fpl)) / w);
  }
  if (!any) throw NumericError("no evaluable points for weighted KS");
  return ksw;
}

double cvm_statistic(const std::vector<double>& x_tail, const PowerLawFit& fit) {
  const std::vector<double> s = sorted_tail(x_tail, fit);
  const std::size_t n = s.size();
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = power_law_cdf(s[i], fit);
  std::sort(u.begin(), u.end());
  const double dn = static_cast<double>(n);
  double w2 = 1.0 / (12.0 * dn);
  for (std::size_t i = 0; i < n; ++i) {
    const double target = (2.0 * static_cast<double>(i) + 1.0) / (2.0 * dn);
    w2 += (u[i] - target) * (u[i] - target);
  }
  return w2;
}

std::vector<double> sample_power_law(const PowerLawFit& fit, std::size_t n,
                                     std::uint64_t seed) {
  if (!(fit.delta > 1.0)) throw ConfigError("power-law sampling needs delta > 1");
  Rng rng(seed);
  const double expo = -1.0 / (fit.delta - 1.0);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = fit.x_min * std::pow(1.0 - rng.uniform(), expo);
  return out;
}

namespace {

struct ReplicaStats {
  double ks = 0.0;
  double ksw = 0.0;
};

// Replica drawn in u-space: sorted uniforms come from normalized exponential
// spacings (no sort needed), and with t_i = -ln(1 - u_i) the refit exponent
// and replica CDF reduce to delta' = 1 + n (delta-1)/sum(t) and
// F'_i = 1 - exp(-(n/sum t) t_i).
ReplicaStats run_replica(std::size_t n, Rng rng) {
  std::vector<double> cum(n + 1);
  double acc = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    acc += rng.exponential();
    cum[i] = acc;
  }
  const double total = cum[n];
  std::vector<double> t(n);
  double sum_t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = std::log(total) - std::log(total - cum[i]);
    sum_t += t[i];
  }
  const double e = static_cast<double>(n) / sum_t;

  constexpr double kEps = 1e-12;
  const double dn = static_cast<double>(n);
  ReplicaStats st;
  for (std::size_t i = 0; i < n; ++i) {
    const double fpl = 1.0 - std::exp(-e * t[i]);
    const double lo = static_cast<double>(i) / dn;
    const double hi = static_cast<double>(i + 1) / dn;
    const double d = std::max(std::abs(fpl - lo), std::abs(hi - fpl));
    st.ks = std::max(st.ks, d);
    if (fpl > kEps && fpl < 1.0 - kEps)
      st.ksw = std::max(st.ksw, d / std::sqrt(fpl * (1.0 - fpl)));
  }
  return st;
}

}  // namespace

GofReport bootstrap_gof(const std::vector<double>& x_tail,
                        const PowerLawFit& fit, int n_bootstrap,
                        std::uint64_t seed) {
  if (n_bootstrap < 100) throw ConfigError("n_bootstrap must be >= 100");
  GofReport rep;
  rep.n_bootstrap = n_bootstrap;
  rep.ks = ks_statistic(x_tail, fit);
  rep.ksw = ksw_statistic(x_tail, fit);
  rep.w2 = cvm_statistic(x_tail, fit);
  rep.cvm_reject_1pct = rep.w2 > kCvmCritical1pct;

  const std::size_t n = fit.n_tail;
  std::vector<ReplicaStats> stats(static_cast<std::size_t>(n_bootstrap));
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(n_bootstrap); ++r)
    stats[static_cast<std::size_t>(r)] =
        run_replica(n, Rng::substream(seed, static_cast<std::uint64_t>(r)));

  int above_ks = 0, above_ksw = 0;
  for (const auto& st : stats) {
    if (st.ks > rep.ks) ++above_ks;
    if (st.ksw > rep.ksw) ++above_ksw;
  }
  rep.p_ks = static_cast<double>(above_ks) / static_cast<double>(n_bootstrap);
  rep.p_ksw = static_cast<double>(above_ksw) / static_cast<double>(n_bootstrap);
  return rep;
}

namespace serial {

GofReport bootstrap_gof(const std::vector<double>& x_tail,
                        const PowerLawFit& fit, int n_bootstrap,
                        std::uint64_t seed) {
  if (n_bootstrap < 100) throw ConfigError("n_bootstrap must be >= 100");
  GofReport rep;
  rep.n_bootstrap = n_bootstrap;
  rep.ks = ks_statistic(x_tail, fit);
  rep.ksw = ksw_statistic(x_tail, fit);
  rep.w2 = cvm_statistic(x_tail, fit);
  rep.cvm_reject_1pct = rep.w2 > kCvmCritical1pct;

  int above_ks = 0, above_ksw = 0;
  for (int r = 0; r < n_bootstrap; ++r) {
    const std::vector<double> xs = sample_power_law(
        fit, fit.n_tail, seed + 0x51ed2700ULL + static_cast<std::uint64_t>(r));
    // refit delta with x_min held fixed
    double sum_ln = 0.0;
    for (double v : xs) sum_ln += std::log(v / fit.x_min);
    PowerLawFit refit = fit;
    refit.delta = 1.0 + static_cast<double>(xs.size()) / sum_ln;
    if (ks_statistic(xs, refit) > rep.ks) ++above_ks;
    if (ksw_statistic(xs, refit) > rep.ksw) ++above_ksw;
  }
  rep.p_ks = static_cast<double>(above_ks) / static_cast<double>(n_bootstrap);
  rep.p_ksw = static_cast<double>(above_ksw) / static_cast<double>(n_bootstrap);
  return rep;
}

}  // namespace serial

}  // namespace ria
