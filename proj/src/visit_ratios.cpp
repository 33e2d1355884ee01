#include "evq/visit_ratios.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <queue>

#include "evq/errors.hpp"

namespace evq {

namespace {

// Breadth-first reachability over an adjacency list.
std::vector<char> reachable(const std::vector<std::vector<int>>& adj,
                            int start) {
  std::vector<char> seen(adj.size(), 0);
  std::queue<int> q;
  q.push(start);
  seen[start] = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        q.push(v);
      }
    }
  }
  return seen;
}

void check_irreducible(const NetworkModel& model) {
  const int n = model.node_count();
  std::vector<std::vector<int>> fwd(n), rev(n);
  for (int i = 0; i < n; ++i) {
    for (const auto& [j, r] : model.routing[i]) {
      (void)r;
      fwd[i].push_back(j);
      rev[j].push_back(i);
    }
  }
  auto down = reachable(fwd, 0);
  auto up = reachable(rev, 0);
  for (int i = 0; i < n; ++i) {
    if (!down[i] || !up[i]) {
      throw ReducibleNetwork("routing chain is not irreducible: node " +
                             std::to_string(i) + " (" + model.nodes[i].label +
                             ") is not on a cycle through node 0");
    }
  }
}

}  // namespace

std::vector<double> visit_ratios(const NetworkModel& model) {
  validate_model(model);
  check_irreducible(model);

  const int n = model.node_count();

  // Balance: lambda^T R = lambda^T, i.e. (R^T - I) lambda = 0. The system is
  // rank n-1 for an irreducible chain; replace the last row with the
  // normalization sum(lambda) = 1 to pin the unique solution.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * static_cast<size_t>(n) + static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (const auto& [j, r] : model.routing[i]) {
      if (j < n - 1) trip.emplace_back(j, i, r);  // (R^T)_{ji}
    }
    if (i < n - 1) trip.emplace_back(i, i, -1.0);
  }
  for (int i = 0; i < n; ++i) trip.emplace_back(n - 1, i, 1.0);

  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();

  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b[n - 1] = 1.0;

  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.analyzePattern(A);
  solver.factorize(A);
  if (solver.info() != Eigen::Success) {
    throw ReducibleNetwork("balance equations are singular");
  }
  Eigen::VectorXd x = solver.solve(b);

  // Iterative refinement with extended-precision residuals. A single LU pass
  // on a few thousand unknowns can lose three or four digits; re-solving for
  // the residual through the existing factorization recovers them.
  for (int round = 0; round < 5; ++round) {
    std::vector<long double> ax(n, 0.0L);
    for (int i = 0; i < n; ++i) {
      const long double xi = x[i];
      for (const auto& [j, r] : model.routing[i]) {
        if (j < n - 1) ax[j] += static_cast<long double>(r) * xi;
      }
      if (i < n - 1) ax[i] -= xi;
      ax[n - 1] += xi;
    }
    Eigen::VectorXd resid(n);
    for (int i = 0; i < n; ++i) {
      const long double bi = (i == n - 1) ? 1.0L : 0.0L;
      resid[i] = static_cast<double>(bi - ax[i]);
    }
    Eigen::VectorXd delta = solver.solve(resid);
    x += delta;
    if (delta.lpNorm<Eigen::Infinity>() <=
        1e-18 * x.lpNorm<Eigen::Infinity>()) {
      break;
    }
  }

  std::vector<double> lambda(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    lambda[i] = x[i];
    sum += x[i];
  }
  // One clean renormalization pass absorbs roundoff from the solve.
  for (double& v : lambda) v /= sum;
  for (double v : lambda) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ReducibleNetwork("balance solution has a nonpositive component");
    }
  }
  return lambda;
}

double balance_residual(const NetworkModel& model,
                        const std::vector<double>& lambda) {
  const int n = model.node_count();
  std::vector<double> inflow(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (const auto& [j, r] : model.routing[i]) {
      inflow[j] += lambda[i] * r;
    }
  }
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    worst = std::max(worst, std::abs(inflow[i] - lambda[i]));
  }
  return worst;
}

}  // namespace evq
