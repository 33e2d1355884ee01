#include "evq/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "evq/errors.hpp"

namespace evq {

namespace {

constexpr double kProbTol = 1e-9;

std::string station_list(const std::vector<StationSpec>& stations) {
  std::ostringstream os;
  for (size_t i = 0; i < stations.size(); ++i) {
    os << (i ? ", " : "") << stations[i].id;
  }
  return os.str();
}

}  // namespace

double service_rate(const Node& node, int n) {
  if (n <= 0) return 0.0;
  switch (node.kind) {
    case NodeKind::SingleServer:
      return node.base_rate;
    case NodeKind::InfiniteServer:
      return n * node.base_rate;
    case NodeKind::FiniteServer:
      return std::min(n, node.servers) * node.base_rate;
  }
  return 0.0;
}

double TravelSpec::edge_hours(const std::string& from,
                              const std::string& to) const {
  auto it = mean_time.find({from, to});
  if (it != mean_time.end()) return it->second;
  if (uniform_hours > 0.0) return uniform_hours;
  throw MissingTravelTime("no mean travel time for edge " + from + " -> " + to);
}

double NetworkModel::routing_entry(int from, int to) const {
  for (const auto& [j, r] : routing.at(from)) {
    if (j == to) return r;
  }
  return 0.0;
}

std::vector<int> NetworkModel::nodes_of_kind(NodeKind kind) const {
  std::vector<int> out;
  for (int i = 0; i < node_count(); ++i) {
    if (nodes[i].kind == kind) out.push_back(i);
  }
  return out;
}

NetworkModel build_network(const std::vector<StationSpec>& stations,
                           const TravelSpec& travel) {
  const int s = static_cast<int>(stations.size());
  if (s < 2) {
    throw InvalidStationSpec("need at least 2 stations, got " +
                             std::to_string(s));
  }

  std::map<std::string, int> index_of;
  for (int i = 0; i < s; ++i) {
    if (!index_of.emplace(stations[i].id, i).second) {
      throw InvalidStationSpec("duplicate station id '" + stations[i].id + "'");
    }
  }

  // Expand and check destination probabilities into a dense s x s matrix.
  std::vector<std::vector<double>> p(s, std::vector<double>(s, 0.0));
  for (int i = 0; i < s; ++i) {
    const StationSpec& st = stations[i];
    if (!(st.arrival_rate > 0.0)) {
      throw InvalidStationSpec("station '" + st.id +
                               "': arrival_rate must be > 0");
    }
    if (st.charge_prob < 0.0 || st.charge_prob > 1.0) {
      throw InvalidStationSpec("station '" + st.id +
                               "': charge_prob must lie in [0,1]");
    }
    if (!(st.mean_charge_time > 0.0)) {
      throw InvalidStationSpec("station '" + st.id +
                               "': mean_charge_time must be > 0");
    }
    if (st.num_chargers < 1) {
      throw InvalidStationSpec("station '" + st.id +
                               "': num_chargers must be >= 1");
    }
    if (st.dest_probs.empty()) {
      // Uniform over the other stations.
      for (int j = 0; j < s; ++j) {
        if (j != i) p[i][j] = 1.0 / (s - 1);
      }
      continue;
    }
    double sum = 0.0;
    for (const auto& [dest, prob] : st.dest_probs) {
      auto it = index_of.find(dest);
      if (it == index_of.end()) {
        throw InvalidStationSpec("station '" + st.id +
                                 "': unknown destination '" + dest +
                                 "' (stations: " + station_list(stations) +
                                 ")");
      }
      if (it->second == i && prob != 0.0) {
        throw InvalidStationSpec("station '" + st.id +
                                 "': self-loop probability must be 0");
      }
      if (prob < 0.0) {
        throw InvalidStationSpec("station '" + st.id +
                                 "': negative probability to '" + dest + "'");
      }
      p[i][it->second] = prob;
      sum += prob;
    }
    p[i][i] = 0.0;
    if (std::abs(sum - 1.0) > kProbTol) {
      throw InvalidStationSpec("station '" + st.id +
                               "': destination probabilities sum to " +
                               std::to_string(sum) + ", expected 1");
    }
  }

  NetworkModel model;
  model.station_count = s;
  model.ss_node.resize(s);
  model.fs_node.resize(s);
  for (int i = 0; i < s; ++i) model.station_ids.push_back(stations[i].id);

  for (int i = 0; i < s; ++i) {
    Node n;
    n.kind = NodeKind::SingleServer;
    n.base_rate = stations[i].arrival_rate;
    n.servers = 1;
    n.station = i;
    n.label = "SS:" + stations[i].id;
    model.ss_node[i] = model.node_count();
    model.nodes.push_back(std::move(n));
  }
  for (int i = 0; i < s; ++i) {
    Node n;
    n.kind = NodeKind::FiniteServer;
    n.base_rate = 1.0 / stations[i].mean_charge_time;
    n.servers = stations[i].num_chargers;
    n.station = i;
    n.label = "FS:" + stations[i].id;
    model.fs_node[i] = model.node_count();
    model.nodes.push_back(std::move(n));
  }
  // IS nodes in lexicographic (origin, destination) order; edges with zero
  // probability are omitted entirely.
  std::vector<std::vector<int>> is_node(s, std::vector<int>(s, -1));
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      if (p[i][j] <= 0.0) continue;
      Node n;
      n.kind = NodeKind::InfiniteServer;
      n.base_rate = 1.0 / travel.edge_hours(stations[i].id, stations[j].id);
      n.servers = kInfiniteServers;
      n.origin = i;
      n.dest = j;
      n.label = "IS:" + stations[i].id + "->" + stations[j].id;
      is_node[i][j] = model.node_count();
      model.nodes.push_back(std::move(n));
    }
  }

  model.routing.resize(model.node_count());
  for (int i = 0; i < s; ++i) {
    // SS_i -> IS_(i,l) carries the destination probability.
    auto& row = model.routing[model.ss_node[i]];
    for (int l = 0; l < s; ++l) {
      if (p[i][l] > 0.0) row.emplace_back(is_node[i][l], p[i][l]);
    }
    // FS_j -> SS_j always.
    model.routing[model.fs_node[i]].emplace_back(model.ss_node[i], 1.0);
  }
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      if (is_node[i][j] < 0) continue;
      auto& row = model.routing[is_node[i][j]];
      const double pbar = stations[j].charge_prob;
      // Order rows by target index: SS_j before FS_j.
      if (1.0 - pbar > 0.0) row.emplace_back(model.ss_node[j], 1.0 - pbar);
      if (pbar > 0.0) row.emplace_back(model.fs_node[j], pbar);
    }
  }

  validate_model(model);
  return model;
}

void validate_model(const NetworkModel& model) {
  const int n = model.node_count();
  if (n == 0) throw InvalidModel("model has no nodes");
  if (static_cast<int>(model.routing.size()) != n) {
    throw InvalidModel("routing has " + std::to_string(model.routing.size()) +
                       " rows for " + std::to_string(n) + " nodes");
  }
  for (int i = 0; i < n; ++i) {
    const Node& nd = model.nodes[i];
    if (!(nd.base_rate > 0.0)) {
      throw InvalidModel("node " + std::to_string(i) + " (" + nd.label +
                         ") has nonpositive rate");
    }
    if (nd.kind == NodeKind::FiniteServer && nd.servers < 1) {
      throw InvalidModel("finite-server node " + std::to_string(i) +
                         " has no servers");
    }
    double sum = 0.0;
    int prev = -1;
    for (const auto& [j, r] : model.routing[i]) {
      if (j < 0 || j >= n) {
        throw InvalidModel("routing row " + std::to_string(i) +
                           " targets missing node " + std::to_string(j));
      }
      if (j <= prev) {
        throw InvalidModel("routing row " + std::to_string(i) +
                           " is not sorted by target");
      }
      prev = j;
      if (r <= 0.0) {
        throw InvalidModel("routing row " + std::to_string(i) +
                           " has a nonpositive entry");
      }
      sum += r;
    }
    if (std::abs(sum - 1.0) > kProbTol) {
      throw InvalidModel("routing row " + std::to_string(i) + " sums to " +
                         std::to_string(sum));
    }
  }
}

}  // namespace evq
