#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "evq/distributions.hpp"
#include "evq/model.hpp"
#include "evq/stats.hpp"

namespace evq {

// Discrete-event simulation of the closed vehicle network. Vehicles move
// along the routing matrix exactly as in the analytic model; the point of
// the simulator is that every timing distribution is free, so it can check
// which analytic results survive non-exponential travel, charging, and
// passenger inter-arrival times.

struct SimConfig {
  NetworkModel model;
  int fleet_size = 0;

  // One distribution per node, indexed like model.nodes:
  //   SS nodes: passenger inter-arrival times (mean 1/alpha; exponential
  //             mean gives a Poisson arrival process)
  //   IS nodes: travel times (mean T)
  //   FS nodes: charging times (mean t)
  std::vector<Distribution> node_distributions;

  double horizon_hours = 0.0;
  // Negative means the default of 10% of the horizon.
  double warmup_hours = -1.0;
  int replications = 1;
  int batches = 20;
  std::uint64_t base_seed = 0;

  // Re-checks vehicle conservation across all nodes after every event.
  // O(node count) per event, so tests only.
  bool audit_conservation = false;
};

// Distributions matching the analytic model exactly: Poisson passenger
// arrivals, exponential travel and charging, all at the model's rates.
std::vector<Distribution> exponential_node_distributions(
    const NetworkModel& model);

// Raw per-replication averages over the whole measurement window, one row
// per replication in the CSV export.
struct ReplicationMetrics {
  std::uint64_t seed = 0;
  double system_throughput = 0.0;         // all completions per hour
  std::vector<double> node_throughput;    // completions per hour, per node
  std::vector<double> node_queue_length;  // time-average vehicles, per node
  std::vector<double> availability;       // per station
  std::vector<double> loss_fraction;      // per station
  std::vector<double> fs_delay;           // hours (wait + charge), per station
  long long arrivals = 0;                 // passengers, all stations
  long long losses = 0;
};

struct SimulationReport {
  int replications = 0;
  int batches = 0;
  double horizon_hours = 0.0;
  double warmup_hours = 0.0;
  std::uint64_t base_seed = 0;
  std::vector<std::uint64_t> replication_seeds;  // base_seed ^ k

  // Pooled estimates with 95% confidence half-widths (batch means within a
  // replication, pooled across replications).
  MetricEstimate system_throughput;
  std::vector<MetricEstimate> node_throughput;    // per node
  std::vector<MetricEstimate> node_queue_length;  // per node
  std::vector<MetricEstimate> availability;       // per station
  std::vector<MetricEstimate> loss_fraction;      // per station
  std::vector<MetricEstimate> fs_delay;           // per station

  std::vector<ReplicationMetrics> replication_rows;
};

// Runs the event loop: passenger arrivals at SS nodes take the head vehicle
// (or count a loss), IS nodes delay each vehicle independently, FS nodes
// charge up to v vehicles in parallel with FCFS waiting. Statistics start
// after warmup. Identical configs produce identical reports, bit for bit.
// Throws InvalidConfig.
SimulationReport simulate(const SimConfig& config);

// The one-fast-vs-k-slow comparison run as a closed two-queue cycle: an
// exponential single-server stage (mean queue1_mean) feeding a charging
// stage with k chargers of mean k*t0 each, so every option offers the same
// aggregate charging capacity. Sweeps the charging-time dispersion and
// reports throughput (charge completions per hour) per option, plus where
// each multi-charger option overtakes the single fast charger.
struct TwoQueueSettings {
  double t0 = 0.5;
  double queue1_mean = 0.5;
  std::vector<int> server_options = {1, 2, 5, 10};
  DistFamily charge_family = DistFamily::kGamma;
  std::vector<double> cs2_grid;
  int fleet_size = 10;
  double horizon_hours = 20000.0;
  int replications = 5;
  std::uint64_t base_seed = 0;
};

struct TwoQueueOption {
  int servers = 1;
  std::vector<MetricEstimate> throughput;  // aligned with cs2_grid
  // Interpolated cs2 where this option's throughput first overtakes the
  // single-charger option; absent when the curves do not cross on the grid.
  std::optional<double> crossing_cs2;
};

struct TwoQueueResult {
  std::vector<double> cs2_grid;
  std::vector<TwoQueueOption> options;
};

TwoQueueResult two_queue_charger_experiment(const TwoQueueSettings& settings);

}  // namespace evq
