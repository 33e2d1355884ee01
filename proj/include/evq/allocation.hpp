#pragma once

#include <string>
#include <vector>

#include "evq/economics.hpp"
#include "evq/fleet.hpp"
#include "evq/model.hpp"

namespace evq {

// One evaluated charger vector with the profit decomposition reported in
// allocation tables: profit = revenue - cost - penalty, where
//   revenue = Lambda(V) * sum_{IS} z_i lambda_i
//   cost    = sum_j c_j v_j
//   penalty = sum_k beta_k alpha_k (1 - A_k(V)).
struct CandidateEval {
  std::vector<int> chargers;
  double profit = 0.0;
  double revenue = 0.0;
  double cost = 0.0;
  double penalty = 0.0;
};

// Rebuild the network with charger counts V (one per station) and evaluate
// the allocation objective. Throws BoundViolation if V leaves [1, bounds].
CandidateEval allocation_objective(const NetworkModel& model,
                                   const std::vector<double>& lambda,
                                   const EconomicsSpec& econ, int fleet_size,
                                   const std::vector<int>& chargers,
                                   SolverMethod method = SolverMethod::kMva);

struct AllocationStep {
  // Candidates evaluated from the current vector (one per station whose
  // bound is not yet tight), in station order.
  std::vector<CandidateEval> candidates;
  // Index into candidates of the accepted move, or -1 when the step
  // terminated the search.
  int chosen = -1;
};

struct AllocationResult {
  std::vector<int> chargers;  // V*
  CandidateEval final_eval;
  CandidateEval start_eval;   // the all-ones starting point
  std::vector<AllocationStep> steps;
  // "guaranteed" for two charging stations, where greedy marginal
  // allocation is provably optimal; "heuristic (conjectured optimal)"
  // otherwise.
  std::string optimality;
  std::vector<std::string> warnings;
};

struct AllocationOptions {
  SolverMethod method = SolverMethod::kMva;
};

// Greedy marginal allocation: start at one charger everywhere, repeatedly
// add a charger where profit grows most (ties to the lowest station index),
// stop when no addition helps or every bound binds.
AllocationResult allocate_chargers(const NetworkModel& model,
                                   const std::vector<double>& lambda,
                                   const EconomicsSpec& econ, int fleet_size,
                                   AllocationOptions options = {});

}  // namespace evq
