#pragma once

#include <limits>
#include <vector>

#include "evq/model.hpp"

namespace evq {

// Hourly fleet operating cost g(M), either linear or a tabulated convex
// nondecreasing function. Tabulated values extend beyond the table linearly
// at the final slope.
class FleetCost {
 public:
  FleetCost() = default;

  static FleetCost linear(double coeff_per_vehicle);
  static FleetCost table(std::vector<double> values);  // g(0), g(1), ... g(K)

  double at(int fleet_size) const;

  // Convex and nondecreasing; throws InvalidEconomics otherwise.
  void validate() const;
  // True when g(M) grows without bound (positive linear coefficient, or a
  // positive final tabulated slope). Fleet sizing requires this; a bounded
  // cost would let the profit scan run forever.
  bool unbounded() const;

  bool is_linear() const { return table_.empty(); }
  double linear_coeff() const { return coeff_; }
  const std::vector<double>& table_values() const { return table_; }

 private:
  double coeff_ = 0.0;
  std::vector<double> table_;
};

// Prices, targets, and bounds. Per-station fields accept either one value
// per station or a single broadcast value; per-trip revenue accepts one
// value per IS node (in node order) or a single broadcast value.
struct EconomicsSpec {
  std::vector<double> revenue;              // z, dollars per trip
  FleetCost fleet_cost;                     // g(M), dollars per hour
  std::vector<double> availability_targets; // epsilon per station, in [0,1]
  std::vector<double> charger_cost;         // c_j, dollars per hour per charger
  std::vector<double> loss_penalty;         // beta_k, dollars per lost passenger
  std::vector<int> charger_bounds;          // max chargers per station

  static constexpr int kUnbounded = std::numeric_limits<int>::max();

  // Throws InvalidEconomics on negative prices, targets outside [0,1],
  // bounds < 1, dimension mismatches, or a non-convex cost table.
  void validate(const NetworkModel& model) const;

  // Broadcast-resolved views (size = station count or IS node count).
  std::vector<double> revenue_per_is_node(const NetworkModel& model) const;
  std::vector<double> targets_per_station(const NetworkModel& model) const;
  std::vector<double> charger_cost_per_station(const NetworkModel& model) const;
  std::vector<double> loss_penalty_per_station(
      const NetworkModel& model) const;
  std::vector<int> charger_bounds_per_station(const NetworkModel& model) const;
};

// Revenue accrues on trips, i.e. on IS-node completions:
// sum over IS nodes of z_i * lambda_i (multiplied by Lambda gives $/hour).
double revenue_weight(const NetworkModel& model,
                      const std::vector<double>& lambda,
                      const EconomicsSpec& econ);

}  // namespace evq
