#pragma once

#include <vector>

namespace evq {

// Upper 97.5% Student-t quantile (two-sided 95% confidence), interpolated
// from a fixed table in 1/df above 30 degrees of freedom.
double t_quantile_975(double df);

// A point estimate with its 95% confidence half width.
struct MetricEstimate {
  double mean = 0.0;
  double half_width = 0.0;
};

// Mean and variance-of-the-mean computed from one replication's batch
// values (batch-means method).
struct BatchSummary {
  double mean = 0.0;
  double var_of_mean = 0.0;
  int batches = 0;
};

// Empty input yields an all-zero summary; a single batch has no variance
// estimate and reports var_of_mean = 0 with batches = 1.
BatchSummary summarize_batches(const std::vector<double>& batch_values);

// Combines replications: the grand mean averages the replication means, its
// variance sums the per-replication variances scaled by 1/R^2, and degrees
// of freedom accumulate as sum of (batches - 1).
MetricEstimate pool_replications(const std::vector<BatchSummary>& reps);

}  // namespace evq
