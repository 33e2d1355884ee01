#include "evq/fleet.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "evq/errors.hpp"
#include "evq/mva.hpp"
#include "evq/product_form.hpp"

namespace evq {

namespace {

// |delta f| below this fraction of |f| counts as a flat step (two equal
// optima); the integer concavity argument is exact, the floats are not.
constexpr double kTieRel = 1e-9;

// Availability counts as plateaued when no station moved by more than this
// relative amount over the last kPlateauWindow steps.
constexpr double kPlateauRel = 1e-10;
constexpr int kPlateauWindow = 50;

double min_slack_availability(const std::vector<double>& avail,
                              const std::vector<double>& eps) {
  double worst = HUGE_VAL;
  for (size_t s = 0; s < avail.size(); ++s) {
    worst = std::min(worst, avail[s] - (1.0 - eps[s]));
  }
  return worst;
}

}  // namespace

double fleet_profit(const NetworkModel& model,
                    const std::vector<double>& lambda,
                    const EconomicsSpec& econ, int fleet_size,
                    SolverMethod method) {
  econ.validate(model);
  double throughput = 0.0;
  if (fleet_size > 0) {
    if (method == SolverMethod::kMva) {
      throughput = mva_solve(model, lambda, fleet_size)
                       .state.system_throughput;
    } else {
      const auto g = convolution_g(model, lambda, fleet_size);
      throughput = throughput_from_g(g, fleet_size);
    }
  }
  return throughput * revenue_weight(model, lambda, econ) -
         econ.fleet_cost.at(fleet_size);
}

FleetSizingResult optimal_fleet_size(const NetworkModel& model,
                                     const std::vector<double>& lambda,
                                     const EconomicsSpec& econ,
                                     FleetSizingOptions options) {
  econ.validate(model);
  if (!econ.fleet_cost.unbounded()) {
    throw InvalidEconomics(
        "fleet sizing needs a cost that keeps growing with fleet size; a "
        "bounded cost has no finite profit peak");
  }
  if (options.max_fleet < 1) throw DomainError("max_fleet must be >= 1");

  const auto eps = econ.targets_per_station(model);
  const double rev_weight = revenue_weight(model, lambda, econ);

  MvaStepper stepper(model, lambda);
  FleetSizingResult result;

  double f_prev = -econ.fleet_cost.at(0);  // f(0): no throughput, base cost
  bool prev_feasible = false;
  std::vector<double> prev_avail(model.station_count, 0.0);
  double prev_profit_at = f_prev;

  // Availability history for the plateau test.
  std::deque<std::vector<double>> avail_window;

  auto snapshot_result = [&](std::vector<int> optima, double profit,
                             const std::vector<double>& avail,
                             bool interior) {
    result.optimal_fleet = std::move(optima);
    result.profit = profit;
    result.availability = avail;
    result.peak_interior = interior;
  };

  for (int m = 1; m <= options.max_fleet; ++m) {
    stepper.step();
    const double throughput = stepper.system_throughput();
    const double revenue = throughput * rev_weight;
    const double cost = econ.fleet_cost.at(m);
    const double f = revenue - cost;
    const auto& avail = stepper.state().availability;
    const bool feasible = min_slack_availability(avail, eps) >= 0.0;

    if (options.keep_trace) {
      double min_avail =
          avail.empty() ? 0.0 : *std::min_element(avail.begin(), avail.end());
      result.trace.push_back({m, f, revenue, cost, min_avail});
    }

    if (feasible) {
      const double delta = f - f_prev;
      const double tie = kTieRel * std::max(std::abs(f), std::abs(f_prev));
      if (std::abs(delta) <= tie) {
        // Flat step: both endpoints are optimal, when both are feasible.
        if (prev_feasible) {
          snapshot_result({m - 1, m}, f, prev_avail, true);
        } else {
          snapshot_result({m}, f, avail, true);
        }
        return result;
      }
      if (delta < 0.0) {
        if (prev_feasible) {
          // Peak was the previous size.
          snapshot_result({m - 1}, f_prev, prev_avail, true);
        } else {
          // Profit already declining when feasibility starts: boundary
          // optimum at the smallest feasible fleet.
          snapshot_result({m}, f, avail, false);
        }
        return result;
      }
      prev_feasible = true;
      prev_avail = avail;
      prev_profit_at = f;
    } else {
      avail_window.push_back(avail);
      if (static_cast<int>(avail_window.size()) > kPlateauWindow) {
        avail_window.pop_front();
        double max_rel_change = 0.0;
        for (int s = 0; s < model.station_count; ++s) {
          const double then = avail_window.front()[s];
          const double now = avail[s];
          const double rel =
              std::abs(now - then) / std::max(std::abs(now), 1e-300);
          max_rel_change = std::max(max_rel_change, rel);
        }
        if (max_rel_change < kPlateauRel) {
          throw InfeasibleAtCap(
              "availability targets unreachable: availability stopped "
              "improving at fleet size " + std::to_string(m) +
              " with targets still unmet",
              m, avail);
        }
      }
    }
    f_prev = f;
  }

  if (!prev_feasible) {
    throw InfeasibleAtCap(
        "availability targets not met by the search cap " +
            std::to_string(options.max_fleet) +
            "; availability was still improving, consider raising max_fleet",
        options.max_fleet, stepper.state().availability);
  }

  // Profit still climbing at the cap; report the cap as the constrained
  // best and leave interpretation to the caller.
  snapshot_result({options.max_fleet}, prev_profit_at, prev_avail, false);
  return result;
}

}  // namespace evq
