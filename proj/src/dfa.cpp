#include "ria/dfa.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ria/error.hpp"

namespace ria {

namespace {

std::vector<double> build_profile(const std::vector<double>& series) {
  const std::size_t n = series.size();
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> profile(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += series[i] - mean;
    profile[i] = acc;
  }
  return profile;
}

// Sum of squared residuals of a least-squares line through
// profile[start .. start+l).
double window_ssr(const std::vector<double>& profile, std::size_t start,
                  std::size_t l) {
  const double dl = static_cast<double>(l);
  // Regress y on k = 0..l-1. Closed-form with sk = sum k, skk = sum k^2.
  const double sk = dl * (dl - 1.0) / 2.0;
  const double skk = dl * (dl - 1.0) * (2.0 * dl - 1.0) / 6.0;
  double sy = 0.0, sky = 0.0;
  for (std::size_t k = 0; k < l; ++k) {
    const double y = profile[start + k];
    sy += y;
    sky += static_cast<double>(k) * y;
  }
  const double det = dl * skk - sk * sk;
  const double slope = (dl * sky - sk * sy) / det;
  const double intercept = (sy - slope * sk) / dl;
  double ssr = 0.0;
  for (std::size_t k = 0; k < l; ++k) {
    const double r =
        profile[start + k] - (intercept + slope * static_cast<double>(k));
    ssr += r * r;
  }
  return ssr;
}

double fluctuation_at(const std::vector<double>& profile, std::size_t l) {
  const std::size_t n = profile.size();
  const std::size_t n_win = n / l;
  double ssr = 0.0;
  for (std::size_t w = 0; w < n_win; ++w) ssr += window_ssr(profile, w * l, l);
  for (std::size_t w = 0; w < n_win; ++w)
    ssr += window_ssr(profile, n - (w + 1) * l, l);
  return std::sqrt(ssr / static_cast<double>(2 * n_win * l));
}

void check_windows(std::size_t n, const std::vector<std::size_t>& windows) {
  if (windows.empty()) throw ConfigError("empty DFA window grid");
  for (std::size_t l : windows) {
    if (l < 4) throw ConfigError("DFA window must be >= 4");
    if (l > n / 4)
      throw DataError("DFA window " + std::to_string(l) +
                      " larger than N/4 = " + std::to_string(n / 4));
  }
}

}  // namespace

std::vector<std::size_t> default_window_sizes(std::size_t n) {
  if (n < 32) throw DataError("series too short for DFA");
  const double lo = std::log(8.0);
  const double hi = std::log(static_cast<double>(n) / 4.0);
  std::vector<std::size_t> sizes;
  for (int k = 0; k < 20; ++k) {
    const double t = lo + (hi - lo) * static_cast<double>(k) / 19.0;
    // rounding can overshoot the integer N/4 cap by one
    const auto l = std::min<std::size_t>(
        static_cast<std::size_t>(std::lround(std::exp(t))), n / 4);
    if (sizes.empty() || l > sizes.back()) sizes.push_back(l);
  }
  return sizes;
}

DfaResult dfa_fluctuation(const std::vector<double>& series,
                          const std::vector<std::size_t>& window_sizes) {
  check_windows(series.size(), window_sizes);
  const std::vector<double> profile = build_profile(series);
  DfaResult res;
  res.window_sizes = window_sizes;
  res.fluctuations.resize(window_sizes.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(window_sizes.size());
       ++i)
    res.fluctuations[static_cast<std::size_t>(i)] =
        fluctuation_at(profile, window_sizes[static_cast<std::size_t>(i)]);
  return res;
}

double fit_dfa_exponent(DfaResult& result,
                        std::pair<std::size_t, std::size_t> fit_range) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < result.window_sizes.size(); ++i) {
    const std::size_t l = result.window_sizes[i];
    if (l < fit_range.first || l > fit_range.second) continue;
    const double f = result.fluctuations[i];
    if (!(f > 0.0)) throw NumericError("degenerate fluctuation: F(l) = 0 in fit range");
    lx.push_back(std::log(static_cast<double>(l)));
    ly.push_back(std::log(f));
  }
  const std::size_t m = lx.size();
  if (m < 4) throw DataError("need >= 4 window sizes inside the DFA fit range");

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double dm = static_cast<double>(m);
  const double det = dm * sxx - sx * sx;
  const double slope = (dm * sxy - sx * sy) / det;
  const double intercept = (sy - slope * sx) / dm;

  double ssr = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = ly[i] - (intercept + slope * lx[i]);
    ssr += r * r;
  }
  const double se =
      m > 2 ? std::sqrt(ssr / (dm - 2.0) * dm / det) : 0.0;

  result.alpha = slope;
  result.alpha_se = se;
  result.fit_range = fit_range;
  return slope;
}

DfaResult dfa_analyze(const std::vector<double>& series) {
  DfaResult res = dfa_fluctuation(series, default_window_sizes(series.size()));
  fit_dfa_exponent(res, {16, series.size() / 8});
  return res;
}

namespace serial {

DfaResult dfa_fluctuation(const std::vector<double>& series,
                          const std::vector<std::size_t>& window_sizes) {
  check_windows(series.size(), window_sizes);
  const std::vector<double> profile = build_profile(series);
  DfaResult res;
  res.window_sizes = window_sizes;
  res.fluctuations.reserve(window_sizes.size());
  for (std::size_t l : window_sizes)
    res.fluctuations.push_back(fluctuation_at(profile, l));
  return res;
}

}  // namespace serial

}  // namespace ria
