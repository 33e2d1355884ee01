#include "evq/product_form.hpp"

#include <cmath>
#include <optional>

#include "evq/errors.hpp"

namespace evq {

namespace {

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

// Weight sequence k(0..M) for one node, built incrementally to keep the
// factorial-like products in range.
std::vector<ScaledReal> node_weights(const Node& node, double lambda_i,
                                     int fleet) {
  std::vector<ScaledReal> k(fleet + 1);
  k[0] = ScaledReal::one();
  for (int n = 1; n <= fleet; ++n) {
    k[n] = k[n - 1] * ScaledReal::from(lambda_i / service_rate(node, n));
  }
  return k;
}

// Poisson-shaped weights x^n/n!, used for the pooled infinite-server load.
std::vector<ScaledReal> poisson_weights(double x, int fleet) {
  std::vector<ScaledReal> k(fleet + 1);
  k[0] = ScaledReal::one();
  for (int n = 1; n <= fleet; ++n) {
    k[n] = k[n - 1] * ScaledReal::from(x / n);
  }
  return k;
}

void convolve_in(std::vector<ScaledReal>& g,
                 const std::vector<ScaledReal>& k) {
  const int m_max = static_cast<int>(g.size()) - 1;
  std::vector<ScaledReal> out(m_max + 1);
  for (int m = 0; m <= m_max; ++m) {
    ScaledReal acc;
    for (int n = 0; n <= m; ++n) {
      acc = acc + k[n] * g[m - n];
    }
    out[m] = acc;
  }
  g.swap(out);
}

// Load-independent nodes (SS: u(n) = alpha) fold in via the O(M) recurrence
// G_new(m) = G_old(m) + gamma * G_new(m-1), gamma = lambda/alpha.
void convolve_in_geometric(std::vector<ScaledReal>& g, double gamma) {
  const ScaledReal sg = ScaledReal::from(gamma);
  for (size_t m = 1; m < g.size(); ++m) {
    g[m] = g[m] + sg * g[m - 1];
  }
}

// Total pooled infinite-server load sum lambda_e * T_e. Every IS node has
// Poisson weights x_e^n/n!, and a convolution of Poisson weight sequences is
// the Poisson sequence of the summed loads (multinomial identity), so the
// whole IS block enters the convolution as one node.
double pooled_is_load(const NetworkModel& model,
                      const std::vector<double>& lambda,
                      std::optional<int> skip_node = std::nullopt) {
  double x = 0.0;
  for (int i = 0; i < model.node_count(); ++i) {
    if (model.nodes[i].kind != NodeKind::InfiniteServer) continue;
    if (skip_node && *skip_node == i) continue;
    x += lambda[i] / model.nodes[i].base_rate;
  }
  return x;
}

// G with one node excluded (used for marginals when deconvolution is
// rejected). Skipping an IS node just shrinks the pooled load.
std::vector<ScaledReal> convolution_without(const NetworkModel& model,
                                            const std::vector<double>& lambda,
                                            int fleet, int skip_node) {
  std::vector<ScaledReal> g(fleet + 1);
  g[0] = ScaledReal::one();
  const double x = pooled_is_load(model, lambda, skip_node);
  if (x > 0.0) convolve_in(g, poisson_weights(x, fleet));
  for (int i = 0; i < model.node_count(); ++i) {
    if (i == skip_node) continue;
    const Node& nd = model.nodes[i];
    if (nd.kind == NodeKind::InfiniteServer) continue;
    if (nd.kind == NodeKind::SingleServer) {
      convolve_in_geometric(g, lambda[i] / nd.base_rate);
    } else {
      convolve_in(g, node_weights(nd, lambda[i], fleet));
    }
  }
  return g;
}

// Remove node weights k from g by solving g = gi (*) k for gi. O(M^2) like a
// convolution but subtractive, so cancellation can blow it up; the caller
// verifies by re-convolving.
std::vector<ScaledReal> deconvolve(const std::vector<ScaledReal>& g,
                                   const std::vector<ScaledReal>& k) {
  const int m_max = static_cast<int>(g.size()) - 1;
  std::vector<ScaledReal> gi(m_max + 1);
  gi[0] = g[0];
  for (int m = 1; m <= m_max; ++m) {
    ScaledReal acc = g[m];
    for (int n = 1; n <= m; ++n) {
      acc = acc - k[n] * gi[m - n];
    }
    gi[m] = acc;
  }
  return gi;
}

bool reconvolution_close(const std::vector<ScaledReal>& g,
                         const std::vector<ScaledReal>& gi,
                         const std::vector<ScaledReal>& k) {
  const int m_max = static_cast<int>(g.size()) - 1;
  for (int m = 0; m <= m_max; ++m) {
    ScaledReal acc;
    for (int n = 0; n <= m; ++n) {
      acc = acc + k[n] * gi[m - n];
    }
    const double rel = (acc - g[m]).ratio_to(g[m]);
    if (!(std::abs(rel) < 1e-8)) return false;
  }
  // Node-removed constants are normalization constants themselves and must
  // be positive; cancellation that flips a sign is a rejection even when the
  // reconvolution happens to match.
  for (int m = 0; m <= m_max; ++m) {
    if (!(gi[m].mantissa > 0.0)) return false;
  }
  return true;
}

}  // namespace

std::vector<ScaledReal> convolution_g(const NetworkModel& model,
                                      const std::vector<double>& lambda,
                                      int fleet_size) {
  if (fleet_size < 0) {
    throw DomainError("fleet size must be >= 0");
  }
  if (lambda.size() != static_cast<size_t>(model.node_count())) {
    throw InvalidModel("visit-ratio vector length does not match node count");
  }
  const std::vector<double> lam = normalized(lambda);
  auto g = convolution_without(model, lam, fleet_size, /*skip_node=*/-1);
  for (int m = 0; m <= fleet_size; ++m) {
    if (!(g[m].mantissa > 0.0)) {
      throw NumericalUnderflow("normalization constant G(" +
                               std::to_string(m) + ") is not positive");
    }
  }
  return g;
}

double throughput_from_g(const std::vector<ScaledReal>& g, int fleet_size) {
  if (fleet_size <= 0) return 0.0;
  return g[fleet_size - 1].ratio_to(g[fleet_size]);
}

std::vector<double> marginal_distribution(const NetworkModel& model,
                                          const std::vector<double>& lambda,
                                          const std::vector<ScaledReal>& g,
                                          int node) {
  const int fleet = static_cast<int>(g.size()) - 1;
  const std::vector<double> lam = normalized(lambda);
  const Node& nd = model.nodes[node];

  std::vector<double> p(fleet + 1, 0.0);

  if (nd.kind == NodeKind::SingleServer) {
    // Closed form: p(n) = gamma^n [G(M-n) - gamma G(M-n-1)] / G(M). The
    // gamma powers are kept in scaled form; they underflow double quickly.
    const double gamma = lam[node] / nd.base_rate;
    const ScaledReal sg = ScaledReal::from(gamma);
    ScaledReal pow = ScaledReal::one();
    for (int n = 0; n <= fleet; ++n) {
      ScaledReal core = g[fleet - n];
      if (n < fleet) core = core - sg * g[fleet - n - 1];
      p[n] = (pow * core).ratio_to(g[fleet]);
      if (p[n] < 0.0 && p[n] > -1e-12) p[n] = 0.0;
      pow = pow * sg;
    }
    return p;
  }

  std::vector<ScaledReal> k =
      nd.kind == NodeKind::InfiniteServer
          ? poisson_weights(lam[node] / nd.base_rate, fleet)
          : node_weights(nd, lam[node], fleet);

  std::vector<ScaledReal> gi = deconvolve(g, k);
  if (!reconvolution_close(g, gi, k)) {
    gi = convolution_without(model, lam, fleet, node);
  }
  for (int n = 0; n <= fleet; ++n) {
    p[n] = (k[n] * gi[fleet - n]).ratio_to(g[fleet]);
  }
  return p;
}

ProductFormSolution solve_product_form(const NetworkModel& model,
                                       const std::vector<double>& lambda,
                                       int fleet_size, bool want_marginals) {
  ProductFormSolution sol;
  sol.fleet_size = fleet_size;
  sol.lambda = normalized(lambda);
  sol.g = convolution_g(model, sol.lambda, fleet_size);
  sol.system_throughput = throughput_from_g(sol.g, fleet_size);

  const int n = model.node_count();
  sol.node_throughput.resize(n);
  for (int i = 0; i < n; ++i) {
    sol.node_throughput[i] = sol.lambda[i] * sol.system_throughput;
  }
  sol.availability.resize(model.station_count);
  for (int s = 0; s < model.station_count; ++s) {
    const int i = model.ss_node.empty() ? -1 : model.ss_node[s];
    if (i < 0) continue;
    sol.availability[s] =
        sol.lambda[i] / model.nodes[i].base_rate * sol.system_throughput;
  }

  if (want_marginals) {
    sol.marginals.resize(n);
    for (int i = 0; i < n; ++i) {
      sol.marginals[i] = marginal_distribution(model, sol.lambda, sol.g, i);
    }
  }
  return sol;
}

}  // namespace evq
