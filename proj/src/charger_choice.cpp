#include "evq/charger_choice.hpp"

#include "evq/errors.hpp"

namespace evq {

namespace {

void check_utilization(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw DomainError("utilization must lie strictly inside (0,1)");
  }
}

void check_mean(double t0) {
  if (!(t0 > 0.0)) {
    throw DomainError("mean charge time must be positive");
  }
}

}  // namespace

ExponentialDelays exponential_delays(double gamma, double t0) {
  check_utilization(gamma);
  check_mean(t0);
  ExponentialDelays d;
  d.one_fast = t0 / (1.0 - gamma);
  d.two_slow = t0 / (1.0 - gamma * gamma);
  return d;
}

double pk_delay(double arrival_rate, double service_mean,
                double service_second_moment) {
  if (!(arrival_rate > 0.0)) {
    throw DomainError("arrival rate must be positive");
  }
  check_mean(service_mean);
  if (service_second_moment < service_mean * service_mean) {
    throw DomainError("service second moment below squared mean");
  }
  const double rho = arrival_rate * service_mean;
  if (rho >= 1.0) {
    throw UnstableQueue("queue utilization at or above 1");
  }
  return arrival_rate * service_second_moment / (2.0 * (1.0 - rho)) +
         service_mean;
}

ZeroInflatedDelays zero_inflated_delays(double gamma, double t0, double p0) {
  check_utilization(gamma);
  check_mean(t0);
  if (!(p0 > 0.0 && p0 <= 1.0)) {
    throw DomainError("mixture probability must lie in (0,1]");
  }
  ZeroInflatedDelays d;
  d.one_fast = (t0 / p0) * gamma / (1.0 - gamma) + t0;
  d.two_slow = 2.0 * t0 * gamma * gamma / (p0 * (1.0 - gamma * gamma)) +
               2.0 * t0;
  d.cs2 = 2.0 / p0 - 1.0;
  d.cs2_threshold = 1.0 + 2.0 / gamma;
  d.two_slow_preferred = d.one_fast > d.two_slow;
  d.above_threshold = d.cs2 > d.cs2_threshold;
  return d;
}

}  // namespace evq
