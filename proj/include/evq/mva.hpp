#pragma once

#include <vector>

#include "evq/model.hpp"

namespace evq {

struct MvaOptions {
  // Squared coefficient of variation of passenger inter-arrival times, per
  // station. Empty means exponential arrivals (the exact recursion); any
  // entry != 1 switches that station's delay term to the renewal-arrival
  // approximation and marks the result approximate.
  std::vector<double> arrival_cs2;
};

struct MvaState {
  int population = 0;
  double system_throughput = 0.0;      // Lambda(m), per hour
  std::vector<double> system_time;     // D_i(m), hours, per node
  std::vector<double> queue_length;    // L_i(m), per node
  std::vector<double> availability;    // per station, at its SS node
  // For FS nodes: marginal probabilities p_i(n) for n = 0..v_i-1 (all the
  // recursion needs) and the surplus-idle term s_i = sum_q (v_i-1-q) p_i(q),
  // the expected idle chargers beyond the one a new arrival would take.
  std::vector<std::vector<double>> fs_marginal;  // empty for non-FS nodes
  std::vector<double> fs_idle;                   // 0 for non-FS nodes
  bool approximate = false;
};

// Incremental mean-value analysis: one step adds one vehicle. Exposes the
// full state after each step so scans (fleet sizing) can stop early without
// recomputing.
class MvaStepper {
 public:
  MvaStepper(const NetworkModel& model, const std::vector<double>& lambda,
             MvaOptions options = {});

  // Advance from population m to m+1.
  void step();

  int population() const { return state_.population; }
  const MvaState& state() const { return state_; }
  double system_throughput() const { return state_.system_throughput; }
  double availability(int station) const {
    return state_.availability[station];
  }

 private:
  const NetworkModel& model_;
  std::vector<double> lambda_;  // normalized
  MvaOptions options_;
  MvaState state_;
};

struct MvaResult {
  MvaState state;                        // at the requested population
  std::vector<double> throughput_by_m;   // Lambda(0..M)
};

// Run the recursion up to the requested population.
MvaResult mva_solve(const NetworkModel& model,
                    const std::vector<double>& lambda, int fleet_size,
                    MvaOptions options = {});

// Renewal-arrival approximation: cs2 per station (scalar broadcast helper).
MvaResult mva_general_arrivals(const NetworkModel& model,
                               const std::vector<double>& lambda,
                               int fleet_size,
                               const std::vector<double>& arrival_cs2);

}  // namespace evq
