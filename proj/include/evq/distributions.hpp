#pragma once

#include <string>

#include "evq/rng.hpp"

namespace evq {

enum class DistFamily {
  kExponential,
  kGamma,
  kInverseGaussian,
  kDeterministic,
  kZeroInflatedExponential,
};

// Parses the schema spelling ("exponential", "gamma", "inverse-gaussian",
// "deterministic", "zero-inflated-exponential"). Throws InvalidConfig on
// anything else.
DistFamily parse_dist_family(const std::string& name);
std::string dist_family_name(DistFamily family);

// A nonnegative time distribution pinned down by its mean and its squared
// coefficient of variation cs2 = variance / mean^2. The parameterization per
// family:
//   exponential               cs2 fixed at 1
//   gamma                     shape = 1/cs2, scale = mean*cs2
//   inverse-gaussian          mu = mean, shape = mean/cs2
//   deterministic             cs2 fixed at 0
//   zero-inflated-exponential P(zero) = 1-p0 with p0 = 2/(1+cs2); otherwise
//                             exponential with mean mean/p0 (needs cs2 >= 1)
struct Distribution {
  DistFamily family = DistFamily::kExponential;
  double mean = 1.0;
  double cs2 = 1.0;

  // Validates the (family, mean, cs2) combination; throws InvalidConfig.
  static Distribution make(DistFamily family, double mean, double cs2);

  // Convenience for the common memoryless case.
  static Distribution exponential(double mean);

  double sample(Pcg32& rng) const;

  double variance() const { return cs2 * mean * mean; }
  double second_moment() const { return mean * mean * (1.0 + cs2); }
  // Probability of an exactly-zero draw (only the zero-inflated family).
  double zero_prob() const;
};

}  // namespace evq
