#include "evq/allocation.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "evq/errors.hpp"
#include "evq/mva.hpp"
#include "evq/product_form.hpp"

namespace evq {

namespace {

// Two candidate profits within this relative distance are a tie; the lower
// station index wins. Symmetric stations produce profits equal up to
// summation order, and the tie rule must see through that noise.
constexpr double kTieRel = 1e-9;

NetworkModel with_chargers(const NetworkModel& model,
                           const std::vector<int>& chargers) {
  NetworkModel out = model;
  for (int s = 0; s < model.station_count; ++s) {
    out.nodes[out.fs_node[s]].servers = chargers[s];
  }
  return out;
}

struct Evaluator {
  const NetworkModel& model;
  const std::vector<double>& lambda;
  const EconomicsSpec& econ;
  int fleet_size;
  SolverMethod method;
  std::vector<int> bounds;
  std::map<std::vector<int>, CandidateEval> memo;

  CandidateEval eval(const std::vector<int>& chargers) {
    auto it = memo.find(chargers);
    if (it != memo.end()) return it->second;

    if (static_cast<int>(chargers.size()) != model.station_count) {
      throw BoundViolation("charger vector needs one entry per station");
    }
    for (int s = 0; s < model.station_count; ++s) {
      if (chargers[s] < 1 || chargers[s] > bounds[s]) {
        std::ostringstream os;
        os << "charger count " << chargers[s] << " at station "
           << model.station_ids[s] << " outside [1, "
           << (bounds[s] == EconomicsSpec::kUnbounded
                   ? std::string("unbounded")
                   : std::to_string(bounds[s]))
           << "]";
        throw BoundViolation(os.str());
      }
    }

    const NetworkModel m = with_chargers(model, chargers);
    double throughput = 0.0;
    std::vector<double> availability(model.station_count, 0.0);
    if (fleet_size > 0) {
      if (method == SolverMethod::kMva) {
        const auto r = mva_solve(m, lambda, fleet_size);
        throughput = r.state.system_throughput;
        availability = r.state.availability;
      } else {
        const auto sol = solve_product_form(m, lambda, fleet_size);
        throughput = sol.system_throughput;
        availability = sol.availability;
      }
    }

    CandidateEval ev;
    ev.chargers = chargers;
    ev.revenue = throughput * revenue_weight(m, lambda, econ);
    const auto c = econ.charger_cost_per_station(m);
    for (int s = 0; s < m.station_count; ++s) ev.cost += c[s] * chargers[s];
    const auto beta = econ.loss_penalty_per_station(m);
    for (int s = 0; s < m.station_count; ++s) {
      const double alpha = m.nodes[m.ss_node[s]].base_rate;
      ev.penalty += beta[s] * alpha * (1.0 - availability[s]);
    }
    ev.profit = ev.revenue - ev.cost - ev.penalty;
    memo.emplace(chargers, ev);
    return ev;
  }
};

}  // namespace

CandidateEval allocation_objective(const NetworkModel& model,
                                   const std::vector<double>& lambda,
                                   const EconomicsSpec& econ, int fleet_size,
                                   const std::vector<int>& chargers,
                                   SolverMethod method) {
  econ.validate(model);
  Evaluator ev{model, lambda, econ, fleet_size, method,
               econ.charger_bounds_per_station(model), {}};
  return ev.eval(chargers);
}

AllocationResult allocate_chargers(const NetworkModel& model,
                                   const std::vector<double>& lambda,
                                   const EconomicsSpec& econ, int fleet_size,
                                   AllocationOptions options) {
  econ.validate(model);
  if (fleet_size < 1) throw DomainError("fleet size must be >= 1");

  AllocationResult result;
  const int s = model.station_count;
  result.optimality = s == 2 ? "guaranteed (two charging stations)"
                             : "heuristic (conjectured optimal)";

  // The optimality argument treats chargers as interchangeable units; with
  // different charging speeds the greedy path is still well-defined but the
  // guarantee is not.
  for (int a = 1; a < s; ++a) {
    if (model.nodes[model.fs_node[a]].base_rate !=
        model.nodes[model.fs_node[0]].base_rate) {
      result.warnings.push_back(
          "charging stations have different mean charge times; the greedy "
          "optimality argument assumes identical chargers");
      break;
    }
  }

  Evaluator ev{model, lambda, econ, fleet_size, options.method,
               econ.charger_bounds_per_station(model), {}};

  std::vector<int> current(s, 1);
  CandidateEval cur_eval = ev.eval(current);
  result.start_eval = cur_eval;

  while (true) {
    AllocationStep step;
    int best = -1;  // index into step.candidates
    for (int j = 0; j < s; ++j) {
      if (current[j] + 1 > ev.bounds[j]) continue;
      std::vector<int> cand = current;
      ++cand[j];
      step.candidates.push_back(ev.eval(cand));
      const int idx = static_cast<int>(step.candidates.size()) - 1;
      if (best < 0) {
        best = idx;
        continue;
      }
      const double hb = step.candidates[best].profit;
      const double hc = step.candidates[idx].profit;
      const double tie = kTieRel * std::max({std::abs(hb), std::abs(hc), 1.0});
      // Strictly better wins; a tie keeps the earlier (lower) station.
      if (hc > hb + tie) best = idx;
    }

    if (best < 0) {
      // Every bound binds; the box corner is the answer.
      result.steps.push_back(std::move(step));
      break;
    }

    const CandidateEval& best_eval = step.candidates[best];
    const double tie = kTieRel * std::max(
        {std::abs(best_eval.profit), std::abs(cur_eval.profit), 1.0});
    if (best_eval.profit <= cur_eval.profit + tie) {
      // No strict improvement available; stop.
      result.steps.push_back(std::move(step));
      break;
    }
    step.chosen = best;
    current = best_eval.chargers;
    cur_eval = best_eval;
    result.steps.push_back(std::move(step));
  }

  result.chargers = current;
  result.final_eval = cur_eval;
  return result;
}

}  // namespace evq
