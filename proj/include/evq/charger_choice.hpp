#pragma once

namespace evq {

// Analytic comparison of one fast charger against several slow ones, viewed
// as an isolated charging queue fed by Poisson arrivals. The fast charger
// serves with mean t0; two slow chargers serve with mean 2*t0 each, so both
// designs offer the same aggregate capacity and the same utilization
// gamma = arrival_rate * t0.

struct ExponentialDelays {
  double one_fast = 0.0;  // t0 / (1 - gamma)
  double two_slow = 0.0;  // t0 / (1 - gamma^2)
};

// Mean sojourn time (wait plus charge) under exponential charging times.
// The two_slow value is the reference closed form as published. A textbook
// M/M/2 with per-server mean 2*t0 has sojourn 2*t0*gamma^2/(1-gamma^2) +
// 2*t0, which is what zero_inflated_delays reduces to at p0 = 1; the
// simulator's two-queue experiment records the measured ordering.
// Throws DomainError when gamma is outside (0,1) or t0 <= 0.
ExponentialDelays exponential_delays(double gamma, double t0);

// Mean sojourn time in a single-server queue with Poisson arrivals and a
// general service distribution, from the first two service moments:
//   D = arrival_rate * E[S^2] / (2 * (1 - rho)) + E[S],  rho = rate * E[S].
// Throws UnstableQueue when rho >= 1, DomainError on invalid moments.
double pk_delay(double arrival_rate, double service_mean,
                double service_second_moment);

// The zero-inflated-exponential charging family: with probability p0 the
// charge takes an exponential time with mean t0/p0, otherwise it finishes
// instantly. Mean stays t0 while the squared coefficient of variation
// c^2 = 2/p0 - 1 grows as p0 shrinks, which makes the family a clean probe
// of how charging-time variability flips the one-fast-vs-two-slow ordering.
struct ZeroInflatedDelays {
  double one_fast = 0.0;       // (t0/p0) * gamma/(1-gamma) + t0
  double two_slow = 0.0;       // 2*t0*gamma^2 / (p0*(1-gamma^2)) + 2*t0
  double cs2 = 0.0;            // 2/p0 - 1
  double cs2_threshold = 0.0;  // 1 + 2/gamma
  // The two indicators below agree identically: one_fast exceeds two_slow
  // exactly when cs2 exceeds the threshold.
  bool two_slow_preferred = false;  // one_fast > two_slow
  bool above_threshold = false;     // cs2 > cs2_threshold
};

// Throws DomainError when gamma is outside (0,1), t0 <= 0, or p0 outside
// (0,1].
ZeroInflatedDelays zero_inflated_delays(double gamma, double t0, double p0);

}  // namespace evq
