#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace evq {

// The closed network has three node kinds:
//   SingleServer   - a departure point; "service" is a passenger arriving and
//                    driving one vehicle away, so the rate is the passenger
//                    arrival rate alpha while at least one vehicle waits.
//   InfiniteServer - a road segment; every vehicle travels independently, so
//                    n vehicles progress at rate n/T.
//   FiniteServer   - a charging point with v chargers; min(n, v) vehicles
//                    charge in parallel at rate 1/t each.
enum class NodeKind { SingleServer, InfiniteServer, FiniteServer };

inline constexpr int kInfiniteServers = -1;

struct Node {
  NodeKind kind;
  // alpha for SingleServer, 1/T for InfiniteServer, 1/t for FiniteServer.
  double base_rate = 0.0;
  // 1 for SingleServer, v for FiniteServer, kInfiniteServers for IS nodes.
  int servers = 1;
  // Owning station index for SS/FS nodes, -1 for IS nodes.
  int station = -1;
  // Station pair (origin, destination) for IS nodes, -1 otherwise.
  int origin = -1;
  int dest = -1;
  std::string label;
};

// Total service rate with n vehicles present.
double service_rate(const Node& node, int n);

// Station-level description, the user-facing input.
struct StationSpec {
  std::string id;
  double arrival_rate = 0.0;     // passengers per hour, alpha > 0
  double charge_prob = 0.0;      // probability an arriving vehicle charges
  double mean_charge_time = 0.0; // hours per charge, t > 0
  int num_chargers = 1;          // v >= 1
  // Destination probabilities keyed by station id. Empty means uniform over
  // all other stations.
  std::map<std::string, double> dest_probs;
};

// Travel times between stations. Only edges with positive routing
// probability need a mean time. The distribution tags are consumed by the
// simulator alone; all analytic solvers depend on the means only.
struct TravelSpec {
  // Uniform mean travel time applied to every edge without an explicit entry.
  // Negative means "no default, every edge must be listed".
  double uniform_hours = -1.0;
  std::map<std::pair<std::string, std::string>, double> mean_time;

  // Simulator-only dispersion tags (see sim.hpp for the families).
  std::string family = "exponential";
  double cs2 = 1.0;

  double edge_hours(const std::string& from, const std::string& to) const;
};

// The assembled node graph. Node order is deterministic: all SS nodes by
// station index, then all FS nodes by station index, then IS nodes sorted
// lexicographically by (origin, destination). Edges with zero routing
// probability get no IS node.
struct NetworkModel {
  std::vector<Node> nodes;
  // Sparse routing matrix: routing[i] lists (j, r_ij) with r_ij > 0, sorted
  // by j. Every row sums to 1.
  std::vector<std::vector<std::pair<int, double>>> routing;
  int station_count = 0;
  std::vector<std::string> station_ids;

  // Node index lookups: ss_node[s] and fs_node[s] for station s.
  std::vector<int> ss_node;
  std::vector<int> fs_node;

  int node_count() const { return static_cast<int>(nodes.size()); }
  double routing_entry(int from, int to) const;
  std::vector<int> nodes_of_kind(NodeKind kind) const;
};

// Assemble the network from station descriptions, realizing the four routing
// cases: SS_i -> IS_(i,l) with probability p_il, IS_(i,j) -> FS_j with the
// charge probability, IS_(i,j) -> SS_j with its complement, FS_j -> SS_j
// with probability 1.
NetworkModel build_network(const std::vector<StationSpec>& stations,
                           const TravelSpec& travel);

// Validate a hand-assembled model (tests build small ad-hoc networks without
// going through build_network). Throws InvalidModel.
void validate_model(const NetworkModel& model);

}  // namespace evq
