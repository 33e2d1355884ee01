#include "evq/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace evq {

namespace {

struct TRow {
  double df;
  double q;
};

// Two-sided 95% (upper 97.5%) quantiles. Dense through 30, then sparse rows
// interpolated linearly in 1/df, which is nearly exact for the t family.
constexpr TRow kTTable[] = {
    {1, 12.706}, {2, 4.303},  {3, 3.182},  {4, 2.776},  {5, 2.571},
    {6, 2.447},  {7, 2.365},  {8, 2.306},  {9, 2.262},  {10, 2.228},
    {11, 2.201}, {12, 2.179}, {13, 2.160}, {14, 2.145}, {15, 2.131},
    {16, 2.120}, {17, 2.110}, {18, 2.101}, {19, 2.093}, {20, 2.086},
    {21, 2.080}, {22, 2.074}, {23, 2.069}, {24, 2.064}, {25, 2.060},
    {26, 2.056}, {27, 2.052}, {28, 2.048}, {29, 2.045}, {30, 2.042},
    {40, 2.021}, {50, 2.009}, {60, 2.000}, {80, 1.990}, {100, 1.984},
    {120, 1.980}, {200, 1.972}, {500, 1.965}, {1000, 1.962},
};

constexpr double kTInf = 1.960;

}  // namespace

double t_quantile_975(double df) {
  if (df <= 1.0) return kTTable[0].q;
  constexpr std::size_t n = sizeof(kTTable) / sizeof(kTTable[0]);
  for (std::size_t i = 1; i < n; ++i) {
    if (df <= kTTable[i].df) {
      const TRow& lo = kTTable[i - 1];
      const TRow& hi = kTTable[i];
      const double w =
          (1.0 / df - 1.0 / lo.df) / (1.0 / hi.df - 1.0 / lo.df);
      return lo.q + w * (hi.q - lo.q);
    }
  }
  const TRow& last = kTTable[n - 1];
  const double w = (1.0 / df) / (1.0 / last.df);
  return kTInf + w * (last.q - kTInf);
}

BatchSummary summarize_batches(const std::vector<double>& batch_values) {
  BatchSummary out;
  out.batches = static_cast<int>(batch_values.size());
  if (batch_values.empty()) return out;
  double sum = 0.0;
  for (double v : batch_values) sum += v;
  out.mean = sum / static_cast<double>(out.batches);
  if (out.batches < 2) return out;
  double ss = 0.0;
  for (double v : batch_values) {
    const double d = v - out.mean;
    ss += d * d;
  }
  const double sample_var = ss / static_cast<double>(out.batches - 1);
  out.var_of_mean = sample_var / static_cast<double>(out.batches);
  return out;
}

MetricEstimate pool_replications(const std::vector<BatchSummary>& reps) {
  MetricEstimate out;
  if (reps.empty()) return out;
  const double r = static_cast<double>(reps.size());
  double mean_sum = 0.0;
  double var_sum = 0.0;
  double df = 0.0;
  for (const BatchSummary& b : reps) {
    mean_sum += b.mean;
    var_sum += b.var_of_mean;
    df += std::max(0, b.batches - 1);
  }
  out.mean = mean_sum / r;
  const double var = var_sum / (r * r);
  if (var > 0.0 && df >= 1.0) {
    out.half_width = t_quantile_975(df) * std::sqrt(var);
  }
  return out;
}

}  // namespace evq
