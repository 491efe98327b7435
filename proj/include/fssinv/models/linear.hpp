#pragma once

// Penalised least squares, one output column at a time over a shared Gram
// matrix. All variants minimise
//
//   1/(2n) ||y - b - X w||^2 + lambda * (rho ||w||_1 + (1 - rho)/2 ||w||^2)
//
// with an unpenalised intercept b. rho = 0 is ridge (closed form), rho = 1
// lasso, anything between elastic net (cyclic coordinate descent).

#include <algorithm>
#include <cmath>
#include <vector>

#include "fssinv/models/design.hpp"
#include "fssinv/parallel.hpp"

namespace fssinv {

struct linear_model {
  column_map map;
  vector_d x_mean;     // F
  Eigen::VectorXd intercept;  // U
  Eigen::MatrixXd coef;       // F x U

  std::vector<double> predict_compressed(const double* x) const {
    const Eigen::Map<const vector_d> xv(x, x_mean.size());
    const Eigen::VectorXd v = intercept + coef.transpose() * xv;
    return {v.data(), v.data() + v.size()};
  }
};

struct coordinate_descent_options {
  double tol = 1e-6;
  int max_sweeps = 1000;
};

namespace detail {

struct centred_problem {
  vector_d x_mean;
  Eigen::VectorXd y_mean;
  Eigen::MatrixXd gram;  // Xc^T Xc / n
  Eigen::MatrixXd cross; // Xc^T Yc / n, F x U
};

inline centred_problem centre(const matrix& x, const matrix& yc) {
  const double n = static_cast<double>(x.rows());
  centred_problem p;
  p.x_mean = x.colwise().mean().transpose();
  p.y_mean = yc.colwise().mean().transpose();
  const Eigen::MatrixXd xc = x.rowwise() - p.x_mean.transpose();
  const Eigen::MatrixXd ycc = yc.rowwise() - p.y_mean.transpose();
  p.gram = xc.transpose() * xc / n;
  p.cross = xc.transpose() * ycc / n;
  return p;
}

inline double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

// Exact solve on the current support with signs held fixed; accepted only
// if the signs survive and the inactive coordinates satisfy the KKT bound.
inline void polish_support(const Eigen::MatrixXd& g, const Eigen::VectorXd& c, double l1, double l2,
                           Eigen::VectorXd& w) {
  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < w.size(); ++j)
    if (w[j] != 0.0) active.push_back(j);
  if (active.empty()) return;
  const auto m = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd a(m, m);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index s = 0; s < m; ++s) a(r, s) = g(active[r], active[s]);
    a(r, r) += l2;
    rhs[r] = c[active[r]] - l1 * (w[active[r]] > 0.0 ? 1.0 : -1.0);
  }
  const Eigen::VectorXd sol = a.ldlt().solve(rhs);
  if (!sol.allFinite()) return;
  Eigen::VectorXd cand = Eigen::VectorXd::Zero(w.size());
  for (Eigen::Index r = 0; r < m; ++r) {
    if (l1 > 0.0 && ((sol[r] > 0.0) != (w[active[r]] > 0.0) || sol[r] == 0.0)) return;
    cand[active[r]] = sol[r];
  }
  const Eigen::VectorXd grad = c - g * cand;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (cand[j] == 0.0 && std::abs(grad[j]) > l1 * (1.0 + 1e-9) + 1e-12) return;
  }
  w = cand;
}

}  // namespace detail

inline linear_model fit_ridge(const matrix& x, const matrix& y, double lambda) {
  auto targets = compress_columns(y);
  auto p = detail::centre(x, targets.values);
  Eigen::MatrixXd a = p.gram;
  a.diagonal().array() += lambda;
  linear_model m;
  m.map = std::move(targets.map);
  m.x_mean = p.x_mean;
  m.coef = a.ldlt().solve(p.cross);
  m.intercept = p.y_mean - m.coef.transpose() * p.x_mean;
  return m;
}

inline linear_model fit_elastic_net(const matrix& x, const matrix& y, double lambda, double rho,
                                    const coordinate_descent_options& opt = {}) {
  auto targets = compress_columns(y);
  auto p = detail::centre(x, targets.values);
  const Eigen::Index nf = p.gram.rows();
  const Eigen::Index nu = p.cross.cols();
  const double l1 = lambda * rho;
  const double l2 = lambda * (1.0 - rho);

  linear_model m;
  m.map = std::move(targets.map);
  m.x_mean = p.x_mean;
  m.coef = Eigen::MatrixXd::Zero(nf, nu);

  parallel_for(static_cast<std::size_t>(nu), [&](std::size_t col) {
    const Eigen::VectorXd c = p.cross.col(static_cast<Eigen::Index>(col));
    Eigen::VectorXd w = Eigen::VectorXd::Zero(nf);
    Eigen::VectorXd gw = Eigen::VectorXd::Zero(nf);  // gram * w
    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
      double max_change = 0.0;
      for (Eigen::Index j = 0; j < nf; ++j) {
        const double denom = p.gram(j, j) + l2;
        const double old = w[j];
        const double z = c[j] - gw[j] + p.gram(j, j) * old;
        const double upd = denom > 0.0 ? detail::soft_threshold(z, l1) / denom : 0.0;
        if (upd != old) {
          gw += p.gram.col(j) * (upd - old);
          w[j] = upd;
          max_change = std::max(max_change, std::abs(upd - old));
        }
      }
      if (max_change < opt.tol) break;
    }
    detail::polish_support(p.gram, c, l1, l2, w);
    m.coef.col(static_cast<Eigen::Index>(col)) = w;
  });
  m.intercept = p.y_mean - m.coef.transpose() * p.x_mean;
  return m;
}

}  // namespace fssinv
