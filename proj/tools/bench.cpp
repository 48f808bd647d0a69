// Timing comparison between the OpenMP kernels and their serial reference
// implementations: x_min scan, bootstrap replicas, DFA windows.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "ria/dfa.hpp"
#include "ria/powerlaw.hpp"
#include "ria/synth.hpp"

namespace {

template <typename F>
double time_ms(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

int main() {
  std::printf("%-28s %12s %12s %8s\n", "kernel", "parallel/ms", "serial/ms",
              "speedup");

  {
    ria::PowerLawFit gen;
    gen.x_min = 1.0;
    gen.delta = 2.2;
    const auto x = ria::sample_power_law(gen, 200000, 42);
    ria::PowerLawFit fp, fs;
    const double tp = time_ms([&] { fp = ria::fit_power_law(x); });
    const double ts = time_ms([&] { fs = ria::serial::fit_power_law(x); });
    std::printf("%-28s %12.1f %12.1f %7.2fx   (delta %.4f vs %.4f)\n",
                "fit_power_law (n=2e5)", tp, ts, ts / tp, fp.delta, fs.delta);

    std::vector<double> tail;
    for (double v : x)
      if (v >= fp.x_min) tail.push_back(v);
    ria::GofReport gp, gs;
    const double bp =
        time_ms([&] { gp = ria::bootstrap_gof(tail, fp, 1000, 7); });
    const double bs =
        time_ms([&] { gs = ria::serial::bootstrap_gof(tail, fp, 1000, 7); });
    std::printf("%-28s %12.1f %12.1f %7.2fx   (p_ks %.3f vs %.3f)\n",
                "bootstrap_gof (B=1000)", bp, bs, bs / bp, gp.p_ks, gs.p_ks);
  }

  {
    const auto series = ria::synth_correlated_gaussian(1 << 18, 0.8, 11);
    const auto windows = ria::default_window_sizes(series.values.size());
    ria::DfaResult rp, rs;
    const double tp =
        time_ms([&] { rp = ria::dfa_fluctuation(series.values, windows); });
    const double ts = time_ms(
        [&] { rs = ria::serial::dfa_fluctuation(series.values, windows); });
    double max_diff = 0.0;
    for (std::size_t i = 0; i < rp.fluctuations.size(); ++i)
      max_diff = std::max(max_diff,
                          std::abs(rp.fluctuations[i] - rs.fluctuations[i]));
    std::printf("%-28s %12.1f %12.1f %7.2fx   (max |dF| %.3g)\n",
                "dfa_fluctuation (n=2^18)", tp, ts, ts / tp, max_diff);
  }
  return 0;
}
