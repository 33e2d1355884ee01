#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "evq/distributions.hpp"
#include "evq/errors.hpp"
#include "evq/rng.hpp"
#include "support/oracles.hpp"

using namespace evq;

namespace {

struct SampleStats {
  double mean = 0.0;
  double cs2 = 0.0;
  double zero_fraction = 0.0;
  double min = 0.0;
};

SampleStats draw_stats(const Distribution& dist, int n, std::uint64_t seed) {
  Pcg32 rng(seed, 5150);
  double sum = 0.0, sumsq = 0.0, zeros = 0.0;
  double lo = 1e300;
  for (int i = 0; i < n; ++i) {
    const double x = dist.sample(rng);
    sum += x;
    sumsq += x * x;
    if (x == 0.0) zeros += 1.0;
    lo = std::min(lo, x);
  }
  SampleStats s;
  s.mean = sum / n;
  const double var = sumsq / n - s.mean * s.mean;
  s.cs2 = var / (s.mean * s.mean);
  s.zero_fraction = zeros / n;
  s.min = lo;
  return s;
}

}  // namespace

TEST_CASE("family names round-trip through the parser") {
  const std::vector<std::string> names = {
      "exponential", "gamma", "inverse-gaussian", "deterministic",
      "zero-inflated-exponential"};
  for (const std::string& n : names) {
    CHECK(dist_family_name(parse_dist_family(n)) == n);
  }
  CHECK_THROWS_AS(parse_dist_family("lognormal"), InvalidConfig);
  CHECK_THROWS_AS(parse_dist_family("Exponential"), InvalidConfig);
  CHECK_THROWS_AS(parse_dist_family(""), InvalidConfig);
}

TEST_CASE("parameter validation per family") {
  CHECK_THROWS_AS(Distribution::make(DistFamily::kExponential, 0.0, 1.0),
                  InvalidConfig);
  CHECK_THROWS_AS(Distribution::make(DistFamily::kExponential, -1.0, 1.0),
                  InvalidConfig);
  // Exponential pins cs2 = 1, deterministic pins cs2 = 0.
  CHECK_THROWS_AS(Distribution::make(DistFamily::kExponential, 1.0, 2.0),
                  InvalidConfig);
  CHECK_THROWS_AS(Distribution::make(DistFamily::kDeterministic, 1.0, 0.5),
                  InvalidConfig);
  CHECK_THROWS_AS(Distribution::make(DistFamily::kGamma, 1.0, 0.0),
                  InvalidConfig);
  CHECK_THROWS_AS(Distribution::make(DistFamily::kGamma, 1.0, -2.0),
                  InvalidConfig);
  CHECK_THROWS_AS(Distribution::make(DistFamily::kInverseGaussian, 1.0, 0.0),
                  InvalidConfig);
  // Thinning cannot push variability below the exponential baseline.
  CHECK_THROWS_AS(
      Distribution::make(DistFamily::kZeroInflatedExponential, 1.0, 0.5),
      InvalidConfig);

  CHECK_NOTHROW(Distribution::make(DistFamily::kExponential, 2.0, 1.0));
  CHECK_NOTHROW(Distribution::make(DistFamily::kDeterministic, 2.0, 0.0));
  CHECK_NOTHROW(
      Distribution::make(DistFamily::kZeroInflatedExponential, 2.0, 1.0));
}

TEST_CASE("moment helpers") {
  const Distribution g = Distribution::make(DistFamily::kGamma, 2.0, 0.5);
  CHECK(g.variance() == doctest::Approx(0.5 * 4.0));
  CHECK(g.second_moment() == doctest::Approx(4.0 * 1.5));
  CHECK(g.zero_prob() == 0.0);

  const Distribution z =
      Distribution::make(DistFamily::kZeroInflatedExponential, 1.0, 3.0);
  // p0 = 2/(1+cs2) = 0.5, so half the draws vanish.
  CHECK(z.zero_prob() == doctest::Approx(0.5));
}

TEST_CASE("sample moments track the requested mean and variability") {
  const int n = 1000000;
  struct Want {
    DistFamily family;
    double mean, cs2;
  };
  const std::vector<Want> grid = {
      {DistFamily::kExponential, 0.5, 1.0},
      {DistFamily::kGamma, 0.5, 0.5},   // shape 2: rejection sampler
      {DistFamily::kGamma, 2.0, 4.0},   // shape 1/4: boosted small-shape path
      {DistFamily::kInverseGaussian, 0.5, 0.5},
      {DistFamily::kInverseGaussian, 1.0, 2.0},
      {DistFamily::kZeroInflatedExponential, 0.5, 3.0},
  };
  std::uint64_t seed = 90210;
  for (const Want& w : grid) {
    const Distribution d = Distribution::make(w.family, w.mean, w.cs2);
    const SampleStats s = draw_stats(d, n, seed++);
    CHECK(s.min >= 0.0);
    CHECK(std::abs(s.mean - w.mean) <= 0.01 * w.mean);
    CHECK(std::abs(s.cs2 - w.cs2) <= 0.05 * w.cs2);
  }
}

TEST_CASE("zero-inflated draws vanish at the advertised rate") {
  const Distribution z =
      Distribution::make(DistFamily::kZeroInflatedExponential, 0.5, 3.0);
  const SampleStats s = draw_stats(z, 1000000, 777);
  CHECK(std::abs(s.zero_fraction - z.zero_prob()) <= 0.003);

  const Distribution e = Distribution::exponential(0.5);
  const SampleStats es = draw_stats(e, 100000, 778);
  CHECK(es.zero_fraction == 0.0);
}

TEST_CASE("deterministic draws are exact") {
  const Distribution d =
      Distribution::make(DistFamily::kDeterministic, 0.75, 0.0);
  Pcg32 rng(1, 2);
  for (int i = 0; i < 100; ++i) CHECK(d.sample(rng) == 0.75);
}

TEST_CASE("sampling is a pure function of the generator state") {
  const Distribution g = Distribution::make(DistFamily::kGamma, 1.0, 2.0);
  Pcg32 a(42, 54), b(42, 54);
  for (int i = 0; i < 1000; ++i) CHECK(g.sample(a) == g.sample(b));

  Pcg32 c(42, 55);
  int differs = 0;
  Pcg32 a2(42, 54);
  for (int i = 0; i < 100; ++i) {
    if (g.sample(a2) != g.sample(c)) ++differs;
  }
  CHECK(differs > 90);
}
