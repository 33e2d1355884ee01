#include <doctest.h>

#include <cmath>

#include "evq/charger_choice.hpp"
#include "evq/errors.hpp"
#include "support/oracles.hpp"

using namespace evq;

TEST_CASE("exponential reference delays") {
  const ExponentialDelays d = exponential_delays(0.5, 0.5);
  CHECK(d.one_fast == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d.two_slow == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  CHECK_THROWS_AS(exponential_delays(0.0, 0.5), DomainError);
  CHECK_THROWS_AS(exponential_delays(1.0, 0.5), DomainError);
  CHECK_THROWS_AS(exponential_delays(-0.2, 0.5), DomainError);
  CHECK_THROWS_AS(exponential_delays(0.5, 0.0), DomainError);
  CHECK_THROWS_AS(exponential_delays(0.5, -1.0), DomainError);
}

TEST_CASE("single-server delay formula recovers the exponential special "
          "case") {
  // Exponential service has second moment 2 mean^2; the general formula must
  // then collapse to mean/(1 - rho).
  for (double rate : {0.3, 0.9, 1.7}) {
    for (double mean : {0.2, 0.5}) {
      const double rho = rate * mean;
      if (rho >= 1.0) continue;
      const double d = pk_delay(rate, mean, 2.0 * mean * mean);
      CHECK(test::rel_close(d, mean / (1.0 - rho), 1e-12));
    }
  }

  // Deterministic service (second moment = mean^2) halves the waiting part.
  const double det = pk_delay(1.0, 0.5, 0.25);
  const double expo = pk_delay(1.0, 0.5, 0.5);
  CHECK(test::rel_close(det - 0.5, 0.5 * (expo - 0.5), 1e-12));

  CHECK_THROWS_AS(pk_delay(2.0, 0.5, 0.5), UnstableQueue);
  CHECK_THROWS_AS(pk_delay(4.0, 0.5, 0.5), UnstableQueue);
  CHECK_THROWS_AS(pk_delay(-1.0, 0.5, 0.5), DomainError);
  CHECK_THROWS_AS(pk_delay(1.0, 0.5, 0.2), DomainError);
}

TEST_CASE("variable charging: delay formulas and moment bookkeeping") {
  for (double gamma : {0.2, 0.5, 0.8}) {
    for (double p0 : {0.1, 0.4, 1.0}) {
      const double t0 = 0.5;
      const ZeroInflatedDelays d = zero_inflated_delays(gamma, t0, p0);
      CHECK(test::rel_close(d.cs2, 2.0 / p0 - 1.0, 1e-15));
      CHECK(test::rel_close(d.cs2_threshold, 1.0 + 2.0 / gamma, 1e-15));

      // The fast-charger delay is exactly the single-server formula with the
      // family's first two moments: E[S] = t0, E[S^2] = t0^2 (1 + cs2).
      const double pk =
          pk_delay(gamma / t0, t0, t0 * t0 * (1.0 + d.cs2));
      CHECK(test::rel_close(d.one_fast, pk, 1e-12));
    }
  }
}

TEST_CASE("no-inflation limit recovers the classical queues") {
  const double gamma = 0.5, t0 = 0.5;
  const ZeroInflatedDelays d = zero_inflated_delays(gamma, t0, 1.0);
  // One fast charger: plain single-server exponential queue.
  CHECK(test::rel_close(d.one_fast, t0 / (1.0 - gamma), 1e-15));

  // Two slow chargers: two-server exponential queue with per-server mean
  // 2 t0, checked against the Erlang delay formula.
  const double per_server_mean = 2.0 * t0;
  const double rho = gamma;  // arrival_rate * per_server_mean / 2
  const double erlang_wait_prob = 2.0 * rho * rho / (1.0 + rho);
  const double sojourn =
      erlang_wait_prob * per_server_mean / (2.0 * (1.0 - rho)) +
      per_server_mean;
  CHECK(test::rel_close(d.two_slow, sojourn, 1e-12));
  CHECK(d.two_slow == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("preference flips exactly at the variability threshold") {
  for (double gamma : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    for (double p0 : {0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 1.0}) {
      const ZeroInflatedDelays d = zero_inflated_delays(gamma, 0.5, p0);
      CHECK(d.two_slow_preferred == (d.one_fast > d.two_slow));
      CHECK(d.above_threshold == (d.cs2 > d.cs2_threshold));
      if (std::abs(d.cs2 - d.cs2_threshold) > 1e-9) {
        CHECK(d.two_slow_preferred == d.above_threshold);
      } else {
        // On the boundary itself (gamma = 0.25, p0 = 0.2 lands there) the
        // two delays coincide and roundoff owns the last bit of each sign.
        CHECK(test::rel_close(d.one_fast, d.two_slow, 1e-12));
      }
    }
  }

  // Walk cs2 across the threshold at gamma = 0.5 (threshold 5, i.e.
  // p0 = 1/3): below it one fast charger wins, above it two slow ones do.
  const ZeroInflatedDelays below = zero_inflated_delays(0.5, 0.5, 0.4);
  CHECK_FALSE(below.above_threshold);
  CHECK(below.one_fast < below.two_slow);
  const ZeroInflatedDelays above = zero_inflated_delays(0.5, 0.5, 0.25);
  CHECK(above.above_threshold);
  CHECK(above.one_fast > above.two_slow);

  // The delay gap and the variability gap vanish together: scan a fine p0
  // ladder and require the two signs to agree pointwise.
  for (int i = 1; i <= 200; ++i) {
    const double p0 = i / 200.0;
    const ZeroInflatedDelays d = zero_inflated_delays(0.37, 0.8, p0);
    const double delay_gap = d.one_fast - d.two_slow;
    const double cs2_gap = d.cs2 - d.cs2_threshold;
    if (std::abs(cs2_gap) > 1e-9) {
      CHECK((delay_gap > 0.0) == (cs2_gap > 0.0));
    }
  }
}

TEST_CASE("variable-charging input validation") {
  CHECK_THROWS_AS(zero_inflated_delays(0.5, 0.5, 0.0), DomainError);
  CHECK_THROWS_AS(zero_inflated_delays(0.5, 0.5, 1.1), DomainError);
  CHECK_THROWS_AS(zero_inflated_delays(0.5, 0.5, -0.3), DomainError);
  CHECK_THROWS_AS(zero_inflated_delays(1.2, 0.5, 0.5), DomainError);
  CHECK_THROWS_AS(zero_inflated_delays(0.5, 0.0, 0.5), DomainError);
}
