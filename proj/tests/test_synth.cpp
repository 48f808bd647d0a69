#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ria/dfa.hpp"
#include "ria/error.hpp"
#include "ria/synth.hpp"

using namespace ria;

namespace {

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("shuffle preserves the multiset and is seed-deterministic") {
  NormalizedReturnSeries r;
  r.sd = 1.0;
  for (int i = 0; i < 257; ++i) r.values.push_back(0.1 * i);

  const auto a = shuffle_surrogate(r, 42);
  const auto b = shuffle_surrogate(r, 42);
  const auto c = shuffle_surrogate(r, 43);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  CHECK(a.values != r.values);

  auto sa = a.values, sr = r.values;
  std::sort(sa.begin(), sa.end());
  std::sort(sr.begin(), sr.end());
  CHECK(sa == sr);
}

TEST_CASE("correlated gaussian: unit variance, zero mean, deterministic") {
  const auto s = synth_correlated_gaussian(1 << 14, 0.8, 9);
  CHECK(mean(s.values) == doctest::Approx(0.0).epsilon(0.05));
  CHECK(variance(s.values) == doctest::Approx(1.0).epsilon(1e-9));
  const auto s2 = synth_correlated_gaussian(1 << 14, 0.8, 9);
  CHECK(s.values == s2.values);
}

TEST_CASE("correlated gaussian: DFA recovers the target exponent") {
  for (double target : {0.5, 0.65, 0.8}) {
    const auto s = synth_correlated_gaussian(1 << 16, target, 123);
    const auto d = dfa_analyze(s.values);
    CHECK_MESSAGE(std::abs(d.alpha - target) < 0.05,
                  "target=", target, " got=", d.alpha);
  }
}

TEST_CASE("correlated gaussian: parameter validation") {
  CHECK_THROWS_AS(synth_correlated_gaussian(1024, 0.4, 1), ConfigError);
  CHECK_THROWS_AS(synth_correlated_gaussian(1024, 1.0, 1), ConfigError);
  CHECK_THROWS_AS(synth_correlated_gaussian(0, 0.8, 1), ConfigError);
}

TEST_CASE("student returns: unit variance and symmetric heavy tails") {
  const std::size_t n = 200000;
  const auto s = synth_student_returns(n, 4.0, 77);
  REQUIRE(s.values.size() == n);
  CHECK(mean(s.values) == doctest::Approx(0.0).epsilon(0.05));
  CHECK(variance(s.values) == doctest::Approx(1.0).epsilon(0.05));

  // heavier than gaussian: P(|r|>3) for a gaussian is ~0.0027; for a
  // variance-rescaled t_4 it is ~0.012
  std::size_t exceed = 0, pos = 0;
  for (double x : s.values) {
    if (std::abs(x) > 3.0) ++exceed;
    if (x > 0.0) ++pos;
  }
  const double frac = static_cast<double>(exceed) / static_cast<double>(n);
  CHECK(frac > 0.006);
  const double posfrac = static_cast<double>(pos) / static_cast<double>(n);
  CHECK(posfrac == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("student returns: tail exponent roughly matches dof") {
  // survival of |r| decays like |r|^-beta; compare log-survival slope between
  // two far-out cutpoints
  const std::size_t n = 1000000;
  const double beta = 3.0;
  const auto s = synth_student_returns(n, beta, 5);
  const double scale = std::sqrt(beta / (beta - 2.0));  // raw t units
  auto surv = [&](double a) {
    std::size_t c = 0;
    for (double x : s.values)
      if (std::abs(x) * scale > a) ++c;
    return static_cast<double>(c) / static_cast<double>(n);
  };
  const double a1 = 6.0, a2 = 12.0;
  const double slope = std::log(surv(a1) / surv(a2)) / std::log(a2 / a1);
  CHECK(slope == doctest::Approx(beta).epsilon(0.15));
}

TEST_CASE("student returns: validation") {
  CHECK_THROWS_AS(synth_student_returns(100000, 2.0, 1), ConfigError);
  CHECK_THROWS_AS(synth_student_returns(100, 4.0, 1), ConfigError);
}
