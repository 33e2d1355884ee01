#pragma once

#include <vector>

#include "evq/model.hpp"

namespace evq {

// Solve the global balance equations lambda_i = sum_j lambda_j r_ji for the
// unique probability-normalized visit-ratio vector (sum = 1). The routing
// chain must be irreducible; otherwise ReducibleNetwork is thrown.
std::vector<double> visit_ratios(const NetworkModel& model);

// Residual max_i |lambda_i - sum_j lambda_j r_ji|, exposed for tests.
double balance_residual(const NetworkModel& model,
                        const std::vector<double>& lambda);

}  // namespace evq
