#include "ria/synth.hpp"

#include <fftw3.h>

#include <cmath>
#include <string>
#include <vector>

#include "ria/error.hpp"
#include "ria/rng.hpp"

namespace ria {

NormalizedReturnSeries shuffle_surrogate(const NormalizedReturnSeries& returns,
                                         std::uint64_t seed) {
  const std::size_t n = returns.values.size();
  if (n == 0) throw DataError("insufficient data: empty series");
  NormalizedReturnSeries out = returns;
  Rng rng(seed);
  // Fisher-Yates
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = rng.next_u64() % (i + 1);
    std::swap(out.values[i], out.values[j]);
  }
  return out;
}

ReturnSeries synth_correlated_gaussian(std::size_t n, double alpha_target,
                                       std::uint64_t seed) {
  if (n < (1u << 10))
    throw ConfigError("synth_correlated_gaussian: n must be >= 1024");
  if (alpha_target < 0.5 || alpha_target >= 1.0)
    throw ConfigError("synth_correlated_gaussian: alpha_target must be in [0.5, 1)");

  // S(f) ~ f^-gamma with gamma = 2*alpha - 1; amplitude filter f^(-gamma/2).
  const double gamma = 2.0 * alpha_target - 1.0;
  const std::size_t nh = n / 2 + 1;
  Rng rng(seed);

  std::vector<fftw_complex> spectrum(nh);
  spectrum[0][0] = 0.0;  // zero mean
  spectrum[0][1] = 0.0;
  for (std::size_t k = 1; k < nh; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(n);
    const double amp = std::pow(f, -0.5 * gamma);
    spectrum[k][0] = amp * rng.normal();
    spectrum[k][1] = amp * rng.normal();
  }
  if (n % 2 == 0) spectrum[nh - 1][1] = 0.0;  // Nyquist bin must be real

  std::vector<double> series(n);
  fftw_plan plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), spectrum.data(),
                                        series.data(), FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  // Rescale to zero mean, unit variance.
  double sum = 0.0, sum2 = 0.0;
  for (double v : series) {
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / static_cast<double>(n);
  const double sd =
      std::sqrt(sum2 / static_cast<double>(n) - mean * mean);
  ReturnSeries out;
  out.values.resize(n);
  out.alignment.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = (series[i] - mean) / sd;
    out.alignment[i] = i;
  }
  return out;
}

NormalizedReturnSeries synth_student_returns(std::size_t n, double beta,
                                             std::uint64_t seed) {
  if (n < 10000) throw ConfigError("synth_student_returns: n must be >= 10^4");
  if (!(beta > 2.0))
    throw ConfigError("synth_student_returns: beta must be > 2 (finite variance)");

  // t_df has variance df/(df-2); divide so the population variance is 1.
  const double scale = std::sqrt(beta / (beta - 2.0));
  Rng rng(seed);
  NormalizedReturnSeries out;
  out.sd = 1.0;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.values[i] = rng.student_t(beta) / scale;
  return out;
}

}  // namespace ria
