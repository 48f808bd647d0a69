#pragma once

#include <cstdint>

#include "ria/series.hpp"

namespace ria {

// Uniform random permutation of the values; multiset preserved, deterministic
// per seed.
NormalizedReturnSeries shuffle_surrogate(const NormalizedReturnSeries& returns,
                                         std::uint64_t seed);

// Gaussian series with power spectrum S(f) ~ f^-(2*alpha_target - 1),
// built by spectral synthesis (filtered amplitudes, random phases, inverse
// FFT). DFA on the output recovers alpha_target. alpha_target in [0.5, 1);
// 0.5 gives white noise.
ReturnSeries synth_correlated_gaussian(std::size_t n, double alpha_target,
                                       std::uint64_t seed);

// i.i.d. Student draws with tail exponent beta (degrees of freedom = beta),
// rescaled to unit variance. Requires beta > 2.
NormalizedReturnSeries synth_student_returns(std::size_t n, double beta,
                                             std::uint64_t seed);

}  // namespace ria
