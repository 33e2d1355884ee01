#include "evq/mva.hpp"

#include <cmath>
#include <string>

#include "evq/errors.hpp"

namespace evq {

namespace {

constexpr double kProbabilityTol = 1e-9;

std::vector<double> normalized(const std::vector<double>& lambda) {
  double sum = 0.0;
  for (double v : lambda) sum += v;
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    throw NumericalBreakdown("visit ratios do not sum to a positive value");
  }
  std::vector<double> out(lambda.size());
  for (size_t i = 0; i < lambda.size(); ++i) out[i] = lambda[i] / sum;
  return out;
}

double checked_probability(double p, const std::string& what) {
  if (p < -kProbabilityTol || p > 1.0 + kProbabilityTol) {
    throw NumericalBreakdown(what + " = " + std::to_string(p) +
                             " escaped [0,1]");
  }
  return std::min(1.0, std::max(0.0, p));
}

}  // namespace

MvaStepper::MvaStepper(const NetworkModel& model,
                       const std::vector<double>& lambda, MvaOptions options)
    : model_(model), lambda_(normalized(lambda)), options_(std::move(options)) {
  const int n = model_.node_count();
  if (lambda_.size() != static_cast<size_t>(n)) {
    throw InvalidModel("visit-ratio vector length does not match node count");
  }
  if (!options_.arrival_cs2.empty() &&
      options_.arrival_cs2.size() !=
          static_cast<size_t>(model_.station_count)) {
    throw InvalidModel("arrival_cs2 must have one entry per station");
  }
  for (double c : options_.arrival_cs2) {
    if (!(c >= 0.0)) throw DomainError("arrival_cs2 must be >= 0");
  }

  state_.population = 0;
  state_.system_time.assign(n, 0.0);
  state_.queue_length.assign(n, 0.0);
  state_.availability.assign(model_.station_count, 0.0);
  state_.fs_marginal.resize(n);
  state_.fs_idle.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const Node& nd = model_.nodes[i];
    if (nd.kind != NodeKind::FiniteServer) continue;
    // Empty network: no vehicles at the charger, all servers idle.
    state_.fs_marginal[i].assign(nd.servers, 0.0);
    state_.fs_marginal[i][0] = 1.0;
    state_.fs_idle[i] = nd.servers - 1.0;
  }
  for (double c : options_.arrival_cs2) {
    if (c != 1.0) state_.approximate = true;
  }
}

void MvaStepper::step() {
  const int n = model_.node_count();
  const int m = state_.population + 1;
  const double prev_throughput = state_.system_throughput;

  // Mean time a newly added vehicle spends per visit at each node, given the
  // state the remaining m-1 vehicles produce (arrival theorem).
  double denom = 0.0;
  for (int i = 0; i < n; ++i) {
    const Node& nd = model_.nodes[i];
    double d = 0.0;
    switch (nd.kind) {
      case NodeKind::InfiniteServer:
        d = 1.0 / nd.base_rate;
        break;
      case NodeKind::SingleServer: {
        const double cs2 = options_.arrival_cs2.empty()
                               ? 1.0
                               : options_.arrival_cs2[nd.station];
        if (cs2 == 1.0) {
          d = (1.0 + state_.queue_length[i]) / nd.base_rate;
        } else {
          // Renewal passenger arrivals: the queue drains at arrival epochs,
          // so the backlog term gets the residual-inter-arrival correction
          // rho*(1+cs2)/2 in place of one full utilization unit.
          const double rho =
              lambda_[i] / nd.base_rate * prev_throughput;
          d = (1.0 + state_.queue_length[i] - rho + rho * (1.0 + cs2) / 2.0) /
              nd.base_rate;
        }
        break;
      }
      case NodeKind::FiniteServer:
        // Backlog ahead of the arriver plus the idle-charger headroom spread
        // over v parallel servers.
        d = (1.0 + state_.queue_length[i] + state_.fs_idle[i]) /
            (nd.servers * nd.base_rate);
        break;
    }
    state_.system_time[i] = d;
    denom += lambda_[i] * d;
  }

  const double throughput = m / denom;
  state_.system_throughput = throughput;
  for (int i = 0; i < n; ++i) {
    state_.queue_length[i] = lambda_[i] * throughput * state_.system_time[i];
  }

  // FS marginals at the new population, from the previous stage's values.
  for (int i = 0; i < n; ++i) {
    const Node& nd = model_.nodes[i];
    if (nd.kind != NodeKind::FiniteServer) continue;
    const int v = nd.servers;
    std::vector<double>& p = state_.fs_marginal[i];
    std::vector<double> next(v, 0.0);
    const double flow = lambda_[i] * throughput;
    for (int q = 1; q <= v - 1; ++q) {
      next[q] = flow * p[q - 1] / (q * nd.base_rate);
    }
    // The mean number of busy chargers equals flow/rate (each completed
    // charge occupies one charger for 1/rate on average), which pins p(0).
    double weighted = 0.0;
    for (int q = 1; q <= v - 1; ++q) weighted += (v - q) * next[q];
    double p0 = 1.0 - (flow / nd.base_rate + weighted) / v;
    p0 = checked_probability(p0, "charger-idle probability at " + nd.label);
    next[0] = p0;
    for (int q = 1; q <= v - 1; ++q) {
      next[q] = checked_probability(
          next[q], "charger marginal at " + nd.label);
    }
    double idle = 0.0;
    for (int q = 0; q <= v - 2; ++q) idle += (v - 1 - q) * next[q];
    state_.fs_idle[i] = idle;
    p.swap(next);
  }

  for (int s = 0; s < model_.station_count; ++s) {
    const int i = model_.ss_node[s];
    state_.availability[s] =
        lambda_[i] / model_.nodes[i].base_rate * throughput;
  }
  state_.population = m;
}

MvaResult mva_solve(const NetworkModel& model,
                    const std::vector<double>& lambda, int fleet_size,
                    MvaOptions options) {
  if (fleet_size < 0) throw DomainError("fleet size must be >= 0");
  MvaStepper stepper(model, lambda, std::move(options));
  MvaResult result;
  result.throughput_by_m.reserve(fleet_size + 1);
  result.throughput_by_m.push_back(0.0);
  for (int m = 1; m <= fleet_size; ++m) {
    stepper.step();
    result.throughput_by_m.push_back(stepper.system_throughput());
  }
  result.state = stepper.state();
  return result;
}

MvaResult mva_general_arrivals(const NetworkModel& model,
                               const std::vector<double>& lambda,
                               int fleet_size,
                               const std::vector<double>& arrival_cs2) {
  MvaOptions options;
  if (arrival_cs2.size() == 1 && model.station_count > 1) {
    options.arrival_cs2.assign(model.station_count, arrival_cs2[0]);
  } else {
    options.arrival_cs2 = arrival_cs2;
  }
  return mva_solve(model, lambda, fleet_size, std::move(options));
}

}  // namespace evq
