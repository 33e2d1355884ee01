#include "evq/distributions.hpp"

#include <cmath>
#include <limits>

#include "evq/errors.hpp"

namespace evq {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

double standard_normal(Pcg32& rng) {
  // Box-Muller, cosine half only. next_double() never returns 0, so the log
  // is finite.
  const double u1 = rng.next_double();
  const double u2 = rng.next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

// Marsaglia-Tsang squeeze method. For shape < 1 the standard boost applies:
// draw at shape+1 and multiply by U^(1/shape).
double sample_gamma(Pcg32& rng, double shape, double scale) {
  if (shape < 1.0) {
    const double u = rng.next_double();
    return sample_gamma(rng, shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.next_double();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v * scale;
    }
  }
}

// Michael-Schucany-Haas transform: one normal draw gives a chi-square root,
// a uniform draw picks between the two roots with the right probability.
double sample_inverse_gaussian(Pcg32& rng, double mu, double shape) {
  const double nu = standard_normal(rng);
  const double y = nu * nu;
  double x = mu + mu * mu * y / (2.0 * shape) -
             mu / (2.0 * shape) *
                 std::sqrt(4.0 * mu * shape * y + mu * mu * y * y);
  if (x <= 0.0) {
    // The smaller root is positive in exact arithmetic; cancellation can
    // push it to zero for extreme normal draws.
    x = std::numeric_limits<double>::min();
  }
  const double u = rng.next_double();
  if (u <= mu / (mu + x)) return x;
  return mu * mu / x;
}

}  // namespace

DistFamily parse_dist_family(const std::string& name) {
  if (name == "exponential") return DistFamily::kExponential;
  if (name == "gamma") return DistFamily::kGamma;
  if (name == "inverse-gaussian") return DistFamily::kInverseGaussian;
  if (name == "deterministic") return DistFamily::kDeterministic;
  if (name == "zero-inflated-exponential") {
    return DistFamily::kZeroInflatedExponential;
  }
  throw InvalidConfig("unknown distribution family: " + name);
}

std::string dist_family_name(DistFamily family) {
  switch (family) {
    case DistFamily::kExponential:
      return "exponential";
    case DistFamily::kGamma:
      return "gamma";
    case DistFamily::kInverseGaussian:
      return "inverse-gaussian";
    case DistFamily::kDeterministic:
      return "deterministic";
    case DistFamily::kZeroInflatedExponential:
      return "zero-inflated-exponential";
  }
  return "unknown";
}

Distribution Distribution::make(DistFamily family, double mean, double cs2) {
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw InvalidConfig("distribution mean must be positive and finite");
  }
  if (!std::isfinite(cs2) || cs2 < 0.0) {
    throw InvalidConfig("distribution cs2 must be nonnegative and finite");
  }
  switch (family) {
    case DistFamily::kExponential:
      if (cs2 != 1.0) {
        throw InvalidConfig(
            "exponential has cs2 = 1; pick gamma or zero-inflated-exponential "
            "for other dispersions");
      }
      break;
    case DistFamily::kDeterministic:
      if (cs2 != 0.0) {
        throw InvalidConfig("deterministic has cs2 = 0");
      }
      break;
    case DistFamily::kGamma:
    case DistFamily::kInverseGaussian:
      if (!(cs2 > 0.0)) {
        throw InvalidConfig(dist_family_name(family) +
                            " needs cs2 > 0; use deterministic for cs2 = 0");
      }
      break;
    case DistFamily::kZeroInflatedExponential:
      if (cs2 < 1.0) {
        throw InvalidConfig(
            "zero-inflated-exponential needs cs2 >= 1 (the mixture "
            "probability 2/(1+cs2) must not exceed 1)");
      }
      break;
  }
  Distribution d;
  d.family = family;
  d.mean = mean;
  d.cs2 = cs2;
  return d;
}

Distribution Distribution::exponential(double mean) {
  return make(DistFamily::kExponential, mean, 1.0);
}

double Distribution::zero_prob() const {
  if (family != DistFamily::kZeroInflatedExponential) return 0.0;
  return 1.0 - 2.0 / (1.0 + cs2);
}

double Distribution::sample(Pcg32& rng) const {
  switch (family) {
    case DistFamily::kExponential:
      return -mean * std::log(rng.next_double());
    case DistFamily::kGamma:
      return sample_gamma(rng, 1.0 / cs2, mean * cs2);
    case DistFamily::kInverseGaussian:
      return sample_inverse_gaussian(rng, mean, mean / cs2);
    case DistFamily::kDeterministic:
      return mean;
    case DistFamily::kZeroInflatedExponential: {
      const double p0 = 2.0 / (1.0 + cs2);
      const double u = rng.next_double();
      if (u >= p0) return 0.0;
      return -(mean / p0) * std::log(rng.next_double());
    }
  }
  return mean;
}

}  // namespace evq
