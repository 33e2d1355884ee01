#pragma once

#include <vector>

#include "evq/economics.hpp"
#include "evq/model.hpp"

namespace evq {

enum class SolverMethod { kMva, kConvolution };

// Hourly profit at a given fleet size:
// f(M) = Lambda(M) * sum_{IS} z_i lambda_i  -  g(M).
double fleet_profit(const NetworkModel& model,
                    const std::vector<double>& lambda,
                    const EconomicsSpec& econ, int fleet_size,
                    SolverMethod method = SolverMethod::kMva);

struct FleetTraceRow {
  int fleet_size = 0;
  double profit = 0.0;
  double revenue = 0.0;           // Lambda(M) * sum z_i lambda_i
  double cost = 0.0;              // g(M)
  double min_availability = 0.0;  // min over stations of A_i(M)
};

struct FleetSizingResult {
  // One optimum, or two consecutive fleet sizes with equal profit.
  std::vector<int> optimal_fleet;
  double profit = 0.0;
  std::vector<double> availability;  // per station, at optimal_fleet.front()
  // True when the profit peak lies inside the feasible region; false when
  // the availability constraints bind and the optimum is the smallest
  // feasible fleet (profit already declining there).
  bool peak_interior = true;
  std::vector<FleetTraceRow> trace;
};

struct FleetSizingOptions {
  int max_fleet = 100000;
  bool keep_trace = true;
};

// Upward scan for the constrained profit maximum, driven by the incremental
// MVA recursion (one vehicle per step, so the whole scan costs one MVA run).
// Availability is nondecreasing in M and profit is discretely concave, so
// the first downward profit step after feasibility is the optimum; a zero
// step yields the two-point optimum {M-1, M}. Throws InfeasibleAtCap when
// the targets are still unmet at the cap or availability has flattened out
// below them.
FleetSizingResult optimal_fleet_size(const NetworkModel& model,
                                     const std::vector<double>& lambda,
                                     const EconomicsSpec& econ,
                                     FleetSizingOptions options = {});

}  // namespace evq
