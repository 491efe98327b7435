#pragma once

// Epsilon-insensitive support vector regression with an RBF kernel, one
// output column at a time over a shared kernel matrix.
//
// Each column is fitted on its residual about the training mean, so the
// model is f(x) = mean + sum_i beta_i K(x_i, x) with no free bias. The dual
//   min 1/2 beta^T K beta - r^T beta + eps ||beta||_1,  -C <= beta_i <= C
// is solved by cyclic coordinate descent; each coordinate has a closed-form
// soft-threshold update because K_ii = 1.

#include <algorithm>
#include <cmath>
#include <vector>

#include "fssinv/models/design.hpp"
#include "fssinv/parallel.hpp"

namespace fssinv {

struct svr_params {
  double c = 1.0;
  double epsilon = 0.1;
  double gamma = 0.0;  // 0 = 1/F
  double tol = 1e-4;   // max |delta beta| for convergence
  int max_passes = 1000;
  int stall_passes = 10;  // stop after this many passes without objective progress
};

struct svr_model {
  column_map map;
  matrix support;  // training spectra, n x F
  double gamma = 1.0;
  Eigen::VectorXd mean;  // U
  Eigen::MatrixXd beta;  // n x U

  Eigen::VectorXd kernel_row(const double* x) const {
    Eigen::VectorXd k(support.rows());
    for (Eigen::Index i = 0; i < support.rows(); ++i) {
      double s = 0.0;
      for (Eigen::Index f = 0; f < support.cols(); ++f) {
        const double d = support(i, f) - x[f];
        s += d * d;
      }
      k[i] = std::exp(-gamma * s);
    }
    return k;
  }

  std::vector<double> predict_compressed(const double* x) const {
    const Eigen::VectorXd v = mean + beta.transpose() * kernel_row(x);
    return {v.data(), v.data() + v.size()};
  }
};

inline svr_model fit_svr(const matrix& x, const matrix& y, const svr_params& params) {
  auto targets = compress_columns(y);
  const Eigen::Index n = x.rows();
  const Eigen::Index nu = targets.values.cols();

  svr_model m;
  m.map = std::move(targets.map);
  m.support = x;
  m.gamma = params.gamma > 0.0 ? params.gamma : 1.0 / static_cast<double>(x.cols());
  m.mean = targets.values.colwise().mean().transpose();
  m.beta = Eigen::MatrixXd::Zero(n, nu);

  Eigen::MatrixXd kernel(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd row = m.kernel_row(&x(i, 0));
    kernel.col(i) = row;
  }

  parallel_for(static_cast<std::size_t>(nu), [&](std::size_t col) {
    const auto u = static_cast<Eigen::Index>(col);
    const Eigen::VectorXd r = targets.values.col(u).array() - m.mean[u];
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd kb = Eigen::VectorXd::Zero(n);  // kernel * beta
    double objective = 0.0;
    int stalled = 0;
    for (int pass = 0; pass < params.max_passes; ++pass) {
      double max_change = 0.0;
      double gain = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double kii = kernel(i, i);
        const double old = beta[i];
        const double z = r[i] - kb[i] + kii * old;
        double upd = z > params.epsilon ? (z - params.epsilon) / kii
                     : z < -params.epsilon ? (z + params.epsilon) / kii
                                           : 0.0;
        upd = std::clamp(upd, -params.c, params.c);
        if (upd != old) {
          const double delta = upd - old;
          // Exact decrease of the one-dimensional objective.
          gain += (z * delta - 0.5 * kii * (upd * upd - old * old)) -
                  params.epsilon * (std::abs(upd) - std::abs(old));
          kb += kernel.col(i) * delta;
          beta[i] = upd;
          max_change = std::max(max_change, std::abs(delta));
        }
      }
      objective -= gain;
      if (max_change < params.tol) break;
      stalled = gain > 1e-12 * std::max(1.0, std::abs(objective)) ? 0 : stalled + 1;
      if (stalled >= params.stall_passes) break;
    }
    m.beta.col(u) = beta;
  });
  return m;
}

}  // namespace fssinv
