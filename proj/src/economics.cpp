#include "evq/economics.hpp"

#include <cmath>
#include <string>

#include "evq/errors.hpp"

namespace evq {

namespace {

// Forward differences may wobble by roundoff when the table was produced by
// evaluating a smooth function; treat tiny violations as equality.
constexpr double kConvexityTol = 1e-9;

template <typename T>
std::vector<T> broadcast(const std::vector<T>& in, int count,
                         const std::string& name, T fallback) {
  if (in.empty()) return std::vector<T>(count, fallback);
  if (in.size() == 1) return std::vector<T>(count, in[0]);
  if (in.size() == static_cast<size_t>(count)) return in;
  throw InvalidEconomics(name + " needs 1 or " + std::to_string(count) +
                         " entries, got " + std::to_string(in.size()));
}

}  // namespace

FleetCost FleetCost::linear(double coeff_per_vehicle) {
  FleetCost c;
  c.coeff_ = coeff_per_vehicle;
  return c;
}

FleetCost FleetCost::table(std::vector<double> values) {
  FleetCost c;
  c.table_ = std::move(values);
  if (c.table_.empty()) {
    throw InvalidEconomics("fleet cost table must not be empty");
  }
  return c;
}

double FleetCost::at(int fleet_size) const {
  if (fleet_size < 0) throw DomainError("fleet size must be >= 0");
  if (table_.empty()) return coeff_ * fleet_size;
  const int k = static_cast<int>(table_.size()) - 1;
  if (fleet_size <= k) return table_[fleet_size];
  // Past the table, continue at the final slope.
  const double slope = k == 0 ? 0.0 : table_[k] - table_[k - 1];
  return table_[k] + slope * (fleet_size - k);
}

void FleetCost::validate() const {
  if (table_.empty()) {
    if (coeff_ < 0.0 || !std::isfinite(coeff_)) {
      throw InvalidEconomics("fleet cost coefficient must be >= 0");
    }
    return;
  }
  for (double v : table_) {
    if (!std::isfinite(v)) {
      throw InvalidEconomics("fleet cost table has a non-finite entry");
    }
  }
  double prev_diff = -HUGE_VAL;
  for (size_t i = 1; i < table_.size(); ++i) {
    const double diff = table_[i] - table_[i - 1];
    if (diff < -kConvexityTol) {
      throw InvalidEconomics("fleet cost table decreases at entry " +
                             std::to_string(i));
    }
    if (diff < prev_diff - kConvexityTol) {
      throw InvalidEconomics("fleet cost table is not convex at entry " +
                             std::to_string(i));
    }
    prev_diff = diff;
  }
}

bool FleetCost::unbounded() const {
  if (table_.empty()) return coeff_ > 0.0;
  const int k = static_cast<int>(table_.size()) - 1;
  return k > 0 && table_[k] - table_[k - 1] > 0.0;
}

void EconomicsSpec::validate(const NetworkModel& model) const {
  fleet_cost.validate();
  for (double z : revenue) {
    if (z < 0.0 || !std::isfinite(z)) {
      throw InvalidEconomics("revenue must be >= 0");
    }
  }
  for (double e : targets_per_station(model)) {
    if (e < 0.0 || e > 1.0) {
      throw InvalidEconomics("availability target must lie in [0,1]");
    }
  }
  for (double c : charger_cost_per_station(model)) {
    if (c < 0.0 || !std::isfinite(c)) {
      throw InvalidEconomics("charger cost must be >= 0");
    }
  }
  for (double b : loss_penalty_per_station(model)) {
    if (b < 0.0 || !std::isfinite(b)) {
      throw InvalidEconomics("loss penalty must be >= 0");
    }
  }
  for (int v : charger_bounds_per_station(model)) {
    if (v < 1) throw InvalidEconomics("charger bound must be >= 1");
  }
  // Dimension check for per-IS-node revenue.
  revenue_per_is_node(model);
}

std::vector<double> EconomicsSpec::revenue_per_is_node(
    const NetworkModel& model) const {
  const int count =
      static_cast<int>(model.nodes_of_kind(NodeKind::InfiniteServer).size());
  return broadcast(revenue, count, "revenue", 0.0);
}

std::vector<double> EconomicsSpec::targets_per_station(
    const NetworkModel& model) const {
  // epsilon = 1 means "no availability requirement".
  return broadcast(availability_targets, model.station_count,
                   "availability_targets", 1.0);
}

std::vector<double> EconomicsSpec::charger_cost_per_station(
    const NetworkModel& model) const {
  return broadcast(charger_cost, model.station_count, "charger_cost", 0.0);
}

std::vector<double> EconomicsSpec::loss_penalty_per_station(
    const NetworkModel& model) const {
  return broadcast(loss_penalty, model.station_count, "loss_penalty", 0.0);
}

std::vector<int> EconomicsSpec::charger_bounds_per_station(
    const NetworkModel& model) const {
  return broadcast(charger_bounds, model.station_count, "charger_bounds",
                   kUnbounded);
}

double revenue_weight(const NetworkModel& model,
                      const std::vector<double>& lambda,
                      const EconomicsSpec& econ) {
  const auto z = econ.revenue_per_is_node(model);
  double sum = 0.0;
  int k = 0;
  for (int i = 0; i < model.node_count(); ++i) {
    if (model.nodes[i].kind != NodeKind::InfiniteServer) continue;
    sum += z[k++] * lambda[i];
  }
  return sum;
}

}  // namespace evq
