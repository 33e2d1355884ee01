#pragma once

#include <string>
#include <vector>

#include "evq/distributions.hpp"
#include "evq/economics.hpp"
#include "evq/fleet.hpp"
#include "evq/model.hpp"

namespace evq {

// Which analytic engine a command runs.
enum class MethodChoice { kMva, kConvolution, kBoth };

MethodChoice parse_method_choice(const std::string& name);
std::string method_choice_name(MethodChoice m);

struct SolverSettings {
  MethodChoice method = MethodChoice::kMva;
  int fleet_size = -1;  // -1 means not set in the config
  int max_fleet = 100000;
  // Per-station inter-arrival cs2 for the renewal approximation; empty
  // means exponential arrivals (the exact recursion).
  std::vector<double> arrival_cs2;
};

struct SimSettings {
  double horizon_hours = -1.0;  // -1 means not set in the config
  double warmup_hours = -1.0;   // -1 means the 10% default
  int replications = 5;
  int batches = 20;
  DistFamily charge_family = DistFamily::kExponential;
  double charge_cs2 = 1.0;
  DistFamily arrival_family = DistFamily::kExponential;
  double arrival_cs2 = 1.0;
};

struct LoadedConfig {
  std::vector<StationSpec> stations;
  TravelSpec travel;
  NetworkModel model;
  EconomicsSpec economics;
  bool has_economics = false;
  SolverSettings solver;
  SimSettings sim;
};

// Parses and validates a config document (JSON, schema_version 1; the full
// schema is documented in the README). Unknown keys anywhere are errors, as
// are missing stations/travel sections, underspecified travel edges, or
// economics values outside their ranges. Throws InvalidConfig with the
// offending location in the message.
LoadedConfig parse_config(const std::string& text,
                          const std::string& source_name);

// parse_config over the contents of a file.
LoadedConfig load_config(const std::string& path);

// Simulator distributions for the loaded model: inter-arrival times at SS
// nodes (arrival_family at mean 1/alpha), travel times at IS nodes (the
// travel section's family tag), charge times at FS nodes (charge_family).
std::vector<Distribution> build_node_distributions(const NetworkModel& model,
                                                   const TravelSpec& travel,
                                                   const SimSettings& sim);

}  // namespace evq
