#include <doctest.h>

#include <cmath>

#include "evq/errors.hpp"
#include "evq/fleet.hpp"
#include "evq/product_form.hpp"
#include "evq/visit_ratios.hpp"
#include "support/cases.hpp"
#include "support/oracles.hpp"

using namespace evq;

TEST_CASE("hourly profit is throughput times trip value minus fleet cost") {
  const NetworkModel m = test::three_station_model({3, 2, 2});
  const std::vector<double> lambda = visit_ratios(m);
  EconomicsSpec econ;
  econ.revenue = {30.0};
  econ.fleet_cost = FleetCost::linear(4.0);
  econ.availability_targets = {0.2};

  for (int fleet : {1, 5, 17, 40}) {
    const ProductFormSolution pf = solve_product_form(m, lambda, fleet);
    const double expect =
        pf.system_throughput * revenue_weight(m, lambda, econ) -
        econ.fleet_cost.at(fleet);
    CHECK(test::rel_close(fleet_profit(m, lambda, econ, fleet), expect,
                          1e-10));
    CHECK(test::rel_close(
        fleet_profit(m, lambda, econ, fleet, SolverMethod::kConvolution),
        expect, 1e-10));
  }
}

TEST_CASE("sixty-station sizing reproduces the published operating point") {
  const NetworkModel m = test::sixty_station_model();
  const std::vector<double> lambda = visit_ratios(m);
  const EconomicsSpec econ = test::sixty_station_economics();

  FleetSizingOptions opt;
  opt.max_fleet = 2000;
  const FleetSizingResult res = optimal_fleet_size(m, lambda, econ, opt);

  REQUIRE(res.optimal_fleet == std::vector<int>{763});
  CHECK(res.profit == doctest::Approx(12647.793469116321).epsilon(1e-12));
  CHECK(res.availability[0] ==
        doctest::Approx(0.87221074828416201).epsilon(1e-12));
  CHECK(res.peak_interior);

  // All sixty stations are interchangeable.
  for (double a : res.availability) {
    CHECK(test::rel_close(a, res.availability[0], 1e-10));
  }

  // The trace covers the whole scan and the profit has a single peak.
  REQUIRE_FALSE(res.trace.empty());
  CHECK(res.trace.front().fleet_size == 1);
  CHECK(res.trace.back().fleet_size == 764);
  int sign_changes = 0;
  for (std::size_t i = 1; i + 1 < res.trace.size(); ++i) {
    const double before = res.trace[i].profit - res.trace[i - 1].profit;
    const double after = res.trace[i + 1].profit - res.trace[i].profit;
    if (before > 0.0 && after < 0.0) ++sign_changes;
  }
  CHECK(sign_changes == 1);
  // Availability climbs monotonically along the scan.
  for (std::size_t i = 1; i < res.trace.size(); ++i) {
    CHECK(res.trace[i].min_availability >=
          res.trace[i - 1].min_availability - 1e-12);
  }
}

TEST_CASE("halving the chargers drops availability to the published level") {
  const NetworkModel m = test::sixty_station_model(1);
  const std::vector<double> lambda = visit_ratios(m);
  const ProductFormSolution pf = solve_product_form(m, lambda, 763);
  CHECK(pf.availability[0] > 0.5437);
  CHECK(pf.availability[0] < 0.5457);
}

TEST_CASE("a cap below the feasible region reports the shortfall") {
  const NetworkModel m = test::sixty_station_model();
  const std::vector<double> lambda = visit_ratios(m);
  const EconomicsSpec econ = test::sixty_station_economics();

  FleetSizingOptions opt;
  opt.max_fleet = 100;
  try {
    optimal_fleet_size(m, lambda, econ, opt);
    FAIL("expected InfeasibleAtCap");
  } catch (const InfeasibleAtCap& e) {
    CHECK(e.fleet_cap == 100);
    REQUIRE(e.best_availability.size() == 60);
    CHECK(e.best_availability[0] < 0.8);
    CHECK(e.best_availability[0] > 0.0);
  }
}

TEST_CASE("unreachable targets are detected once availability flattens") {
  // Every vehicle ends up stuck charging: one charger, ten-hour charges,
  // every trip charges. Availability tops out far below the target no matter
  // how many vehicles are added.
  std::vector<StationSpec> stations;
  for (int k = 0; k < 2; ++k) {
    StationSpec s;
    s.id = k == 0 ? "a" : "b";
    s.arrival_rate = 1.0;
    s.charge_prob = 1.0;
    s.mean_charge_time = 10.0;
    s.num_chargers = 1;
    stations.push_back(s);
  }
  TravelSpec travel;
  travel.uniform_hours = 0.1;
  const NetworkModel m = build_network(stations, travel);
  const std::vector<double> lambda = visit_ratios(m);

  EconomicsSpec econ;
  econ.revenue = {30.0};
  econ.fleet_cost = FleetCost::linear(0.01);
  econ.availability_targets = {0.9};

  FleetSizingOptions opt;
  opt.max_fleet = 100000;
  CHECK_THROWS_AS(optimal_fleet_size(m, lambda, econ, opt), InfeasibleAtCap);
}

TEST_CASE("a cost that stops growing makes the scan ill-posed") {
  const NetworkModel m = test::three_station_model({3, 2, 2});
  const std::vector<double> lambda = visit_ratios(m);
  EconomicsSpec econ;
  econ.revenue = {30.0};
  econ.fleet_cost = FleetCost::table({0.0, 2.0, 4.0, 4.0});  // flat tail
  econ.availability_targets = {1.0};
  CHECK_THROWS_AS(optimal_fleet_size(m, lambda, econ), InvalidEconomics);
}

TEST_CASE("tabulated costs participate in sizing and extrapolate linearly") {
  const NetworkModel m = test::three_station_model({3, 2, 2});
  const std::vector<double> lambda = visit_ratios(m);
  EconomicsSpec econ;
  econ.revenue = {30.0};
  econ.fleet_cost = FleetCost::table({0.0, 10.0, 25.0});
  econ.availability_targets = {1.0};

  CHECK(econ.fleet_cost.at(2) == doctest::Approx(25.0));
  CHECK(econ.fleet_cost.at(5) == doctest::Approx(25.0 + 3 * 15.0));

  const FleetSizingResult res = optimal_fleet_size(m, lambda, econ);
  REQUIRE_FALSE(res.optimal_fleet.empty());
  const int star = res.optimal_fleet.front();
  // The scan's winner beats its neighbours.
  const double at = fleet_profit(m, lambda, econ, star);
  if (star > 1) CHECK(at >= fleet_profit(m, lambda, econ, star - 1) - 1e-9);
  CHECK(at >= fleet_profit(m, lambda, econ, star + 1) - 1e-9);
}

TEST_CASE("the scan matches a brute-force feasible search") {
  Pcg32 rng(55117, 6);
  for (int rep = 0; rep < 8; ++rep) {
    const NetworkModel m = test::random_station_model(rng);
    const std::vector<double> lambda = visit_ratios(m);

    EconomicsSpec econ;
    econ.revenue = {20.0 + 10.0 * rng.next_double()};
    // Keep the per-vehicle cost small enough that some fleet is profitable.
    econ.fleet_cost = FleetCost::linear(0.05 + 0.1 * rng.next_double());
    econ.availability_targets = {0.05 + 0.1 * rng.next_double()};

    FleetSizingOptions opt;
    opt.max_fleet = 200;
    opt.keep_trace = false;

    FleetSizingResult res;
    try {
      res = optimal_fleet_size(m, lambda, econ, opt);
    } catch (const InfeasibleAtCap&) {
      continue;  // targets random enough to be unreachable sometimes
    }

    // Brute force over the same range.
    double best = 0.0;
    std::vector<int> argmax;
    const std::vector<double> targets = econ.targets_per_station(m);
    for (int f = 1; f <= 200; ++f) {
      const ProductFormSolution pf = solve_product_form(m, lambda, f);
      bool feasible = true;
      for (int k = 0; k < m.station_count; ++k) {
        if (pf.availability[k] < 1.0 - targets[k]) feasible = false;
      }
      if (!feasible) continue;
      const double p = fleet_profit(m, lambda, econ, f);
      if (argmax.empty() || p > best + 1e-12 * std::abs(best)) {
        best = p;
        argmax = {f};
      } else if (std::abs(p - best) <= 1e-9 * std::max(1.0, std::abs(best))) {
        argmax.push_back(f);
      }
    }
    if (argmax.empty()) continue;
    CHECK(res.optimal_fleet.front() == argmax.front());
    CHECK(test::rel_close(res.profit, best, 1e-9));
  }
}
