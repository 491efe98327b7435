#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "fssinv/error.hpp"

namespace fssinv {

inline void check_same_size(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw dimension_error("metric inputs differ in size");
}

// Pooled coefficient of determination: every entry of every sample counts
// once, and the baseline is the grand mean of y_true.
inline double r2_pooled(std::span<const double> y_true, std::span<const double> y_pred) {
  check_same_size(y_true, y_pred);
  if (y_true.size() < 2) throw metric_error("R^2 needs at least two entries");
  double mean = 0.0;
  for (double v : y_true) mean += v;
  mean /= static_cast<double>(y_true.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t k = 0; k < y_true.size(); ++k) {
    ss_res += (y_true[k] - y_pred[k]) * (y_true[k] - y_pred[k]);
    ss_tot += (y_true[k] - mean) * (y_true[k] - mean);
  }
  if (ss_tot == 0.0) throw metric_error("R^2 undefined: y_true has zero variance");
  return 1.0 - ss_res / ss_tot;
}

// R^2 with a per-output baseline: y_true and y_pred are row-major
// samples x outputs, the baseline of each output is its own mean, and the
// residual and total sums are pooled over outputs. The per-output mean
// predictor scores exactly 0.
inline double r2_per_output_baseline(std::span<const double> y_true, std::span<const double> y_pred,
                                     std::size_t outputs) {
  check_same_size(y_true, y_pred);
  if (outputs == 0 || y_true.size() % outputs != 0) throw dimension_error("bad output count");
  const std::size_t n = y_true.size() / outputs;
  if (n < 2) throw metric_error("R^2 needs at least two samples");
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t p = 0; p < outputs; ++p) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += y_true[i * outputs + p];
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = y_true[i * outputs + p];
      const double e = t - y_pred[i * outputs + p];
      ss_res += e * e;
      ss_tot += (t - mean) * (t - mean);
    }
  }
  if (ss_tot == 0.0) throw metric_error("R^2 undefined: every output is constant");
  return 1.0 - ss_res / ss_tot;
}

inline double mse(std::span<const double> y_true, std::span<const double> y_pred) {
  check_same_size(y_true, y_pred);
  if (y_true.empty()) throw metric_error("MSE of empty input");
  double s = 0.0;
  for (std::size_t k = 0; k < y_true.size(); ++k) s += (y_true[k] - y_pred[k]) * (y_true[k] - y_pred[k]);
  return s / static_cast<double>(y_true.size());
}

// Fraction of entries that match exactly.
inline double pixel_accuracy(std::span<const double> y_true, std::span<const double> y_pred) {
  check_same_size(y_true, y_pred);
  if (y_true.empty()) throw metric_error("accuracy of empty input");
  std::size_t hit = 0;
  for (std::size_t k = 0; k < y_true.size(); ++k) hit += y_true[k] == y_pred[k] ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(y_true.size());
}

}  // namespace fssinv
