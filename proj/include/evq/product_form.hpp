#pragma once

#include <vector>

#include "evq/model.hpp"
#include "evq/scaled.hpp"

namespace evq {

// Stationary product-form analysis via the convolution algorithm.
//
// All entry points renormalize the visit-ratio vector to sum 1, since the
// balance equations only define it up to scale and every published quantity
// (system throughput, availability, marginals) is stated under that
// normalization.

// Normalization constants G(0..M). G(0) = 1; each successive node's weight
// sequence k_i(n) = lambda_i^n / prod_{k<=n} u_i(k) is folded in by discrete
// convolution. Values are carried with per-entry binary exponents, so ratios
// of neighbouring entries stay exact at any scale.
std::vector<ScaledReal> convolution_g(const NetworkModel& model,
                                      const std::vector<double>& lambda,
                                      int fleet_size);

// System throughput Lambda(M) = G(M-1)/G(M); Lambda(0) = 0.
double throughput_from_g(const std::vector<ScaledReal>& g, int fleet_size);

// Marginal distribution p_i(0..M) of the vehicle count at one node.
// Computed from the node-removed constants G_i, obtained by deconvolving the
// node's weights out of G when that is numerically stable and by a fresh
// convolution without the node otherwise. SS nodes additionally have the
// closed form p_i(n) = gamma^n [G(M-n) - gamma G(M-n-1)] / G(M), which is
// what this returns for them (the two agree; tests cross-check).
std::vector<double> marginal_distribution(const NetworkModel& model,
                                          const std::vector<double>& lambda,
                                          const std::vector<ScaledReal>& g,
                                          int node);

struct ProductFormSolution {
  int fleet_size = 0;
  std::vector<double> lambda;      // normalized visit ratios actually used
  std::vector<ScaledReal> g;       // G(0..M)
  double system_throughput = 0.0;  // Lambda(M), per hour
  std::vector<double> node_throughput;  // lambda_i * Lambda(M), per node
  std::vector<double> availability;     // per station, at its SS node
  // Marginal vectors per node, filled only when requested (they cost O(M^2)
  // per node while everything above is a byproduct of one convolution).
  std::vector<std::vector<double>> marginals;
};

ProductFormSolution solve_product_form(const NetworkModel& model,
                                       const std::vector<double>& lambda,
                                       int fleet_size,
                                       bool want_marginals = false);

}  // namespace evq
