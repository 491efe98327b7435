#pragma once

// CART with vector-valued leaves over compressed image targets.
//
// Splits are axis-aligned, x <= threshold goes left, thresholds sit at
// midpoints between consecutive distinct feature values. Classification
// minimises Gini impurity averaged over outputs; regression maximises the
// summed variance reduction. Both reduce to maximising
//   sum_u w_u * (S_L[u] / W_L + S_R[u] / W_R)
// where S is the sum of squared class counts (Gini) or the squared target
// sum (variance) of column u and W the sample weight on each side.
// Ties prefer the lower feature index, then the lower threshold.
//
// Leaves keep the weighted training rows that reach them; leaf values are
// computed from the shared target table.

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "fssinv/models/design.hpp"
#include "fssinv/random.hpp"

namespace fssinv {

enum class tree_task { classification, regression };

struct tree_params {
  int max_depth = 0;           // 0 = unlimited
  double min_samples_leaf = 1;  // in sample weight
  int max_features = 0;         // 0 = all
};

struct tree_node {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int leaf = -1;
};

struct decision_tree {
  std::vector<tree_node> nodes;
  std::vector<int> leaf_begin;  // leaves.size() + 1 offsets into leaf_rows
  std::vector<int> leaf_rows;
  std::vector<double> leaf_weights;

  int leaf_count() const { return static_cast<int>(leaf_begin.size()) - 1; }

  int find_leaf(const double* x) const {
    int k = 0;
    while (nodes[k].feature >= 0) k = x[nodes[k].feature] <= nodes[k].threshold ? nodes[k].left : nodes[k].right;
    return nodes[k].leaf;
  }
};

namespace detail {

class tree_builder {
public:
  tree_builder(const matrix& x, const compressed_targets& y, tree_task task, const tree_params& params,
               rng_engine& rng)
      : x_(x), y_(y), task_(task), params_(params), rng_(rng) {
    const auto u = y.map.distinct();
    if (task_ == tree_task::classification) {
      labels_.resize(static_cast<std::size_t>(y.values.rows()) * u);
      for (Eigen::Index i = 0; i < y.values.rows(); ++i)
        for (std::size_t c = 0; c < u; ++c)
          labels_[i * u + c] = static_cast<std::uint8_t>(y.values(i, static_cast<Eigen::Index>(c)));
      left_counts_.resize(u * num_materials);
      right_counts_.resize(u * num_materials);
    } else {
      left_sums_.resize(u);
      right_sums_.resize(u);
    }
  }

  decision_tree build(std::vector<int> rows, std::vector<double> weights) {
    tree_.leaf_begin.push_back(0);
    grow(rows, weights, 0);
    return std::move(tree_);
  }

private:
  struct split_choice {
    int feature = -1;
    double threshold = 0.0;
    double score = -std::numeric_limits<double>::infinity();
  };

  bool pure(const std::vector<int>& rows) const {
    const Eigen::Index u = y_.values.cols();
    for (std::size_t k = 1; k < rows.size(); ++k) {
      for (Eigen::Index c = 0; c < u; ++c)
        if (y_.values(rows[k], c) != y_.values(rows[0], c)) return false;
    }
    return true;
  }

  void make_leaf(int node, const std::vector<int>& rows, const std::vector<double>& weights) {
    tree_.nodes[node].leaf = tree_.leaf_count();
    for (std::size_t k = 0; k < rows.size(); ++k) {
      tree_.leaf_rows.push_back(rows[k]);
      tree_.leaf_weights.push_back(weights[k]);
    }
    tree_.leaf_begin.push_back(static_cast<int>(tree_.leaf_rows.size()));
  }

  // Score of the unsplit node, same units as split scores.
  double node_score(const std::vector<int>& rows, const std::vector<double>& weights, double total) {
    reset_right(rows, weights);
    return side_score_right() / total;
  }

  void reset_right(const std::vector<int>& rows, const std::vector<double>& weights) {
    const std::size_t u = y_.map.distinct();
    if (task_ == tree_task::classification) {
      std::fill(left_counts_.begin(), left_counts_.end(), 0.0);
      std::fill(right_counts_.begin(), right_counts_.end(), 0.0);
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const std::uint8_t* lab = &labels_[static_cast<std::size_t>(rows[k]) * u];
        for (std::size_t c = 0; c < u; ++c) right_counts_[c * num_materials + lab[c]] += weights[k];
      }
      left_sq_ = 0.0;
      right_sq_ = 0.0;
      for (std::size_t c = 0; c < u; ++c) {
        double s = 0.0;
        for (int m = 0; m < num_materials; ++m) s += right_counts_[c * num_materials + m] * right_counts_[c * num_materials + m];
        right_sq_ += y_.map.weight[c] * s;
      }
    } else {
      std::fill(left_sums_.begin(), left_sums_.end(), 0.0);
      std::fill(right_sums_.begin(), right_sums_.end(), 0.0);
      for (std::size_t k = 0; k < rows.size(); ++k) {
        for (std::size_t c = 0; c < u; ++c)
          right_sums_[c] += weights[k] * y_.values(rows[k], static_cast<Eigen::Index>(c));
      }
      left_sq_ = 0.0;
      right_sq_ = 0.0;
      for (std::size_t c = 0; c < u; ++c) right_sq_ += y_.map.weight[c] * right_sums_[c] * right_sums_[c];
    }
  }

  double side_score_right() const { return right_sq_; }

  // Moves one (weighted) row from the right side to the left side.
  void move_left(int row, double m) {
    const std::size_t u = y_.map.distinct();
    if (task_ == tree_task::classification) {
      const std::uint8_t* lab = &labels_[static_cast<std::size_t>(row) * u];
      for (std::size_t c = 0; c < u; ++c) {
        const std::size_t slot = c * num_materials + lab[c];
        const double w = y_.map.weight[c];
        left_sq_ += w * (2.0 * left_counts_[slot] * m + m * m);
        right_sq_ += w * (-2.0 * right_counts_[slot] * m + m * m);
        left_counts_[slot] += m;
        right_counts_[slot] -= m;
      }
    } else {
      for (std::size_t c = 0; c < u; ++c) {
        const double v = m * y_.values(row, static_cast<Eigen::Index>(c));
        const double w = y_.map.weight[c];
        left_sq_ += w * (2.0 * left_sums_[c] * v + v * v);
        right_sq_ += w * (-2.0 * right_sums_[c] * v + v * v);
        left_sums_[c] += v;
        right_sums_[c] -= v;
      }
    }
  }

  static bool better(const split_choice& cand, const split_choice& best) {
    if (cand.score != best.score) return cand.score > best.score;
    if (cand.feature != best.feature) return cand.feature < best.feature;
    return cand.threshold < best.threshold;
  }

  // Best split on one feature; returns false when the feature is constant
  // on this node.
  bool scan_feature(int f, const std::vector<int>& rows, const std::vector<double>& weights, double total,
                    split_choice& best) {
    order_.resize(rows.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      const double xa = x_(rows[a], f), xb = x_(rows[b], f);
      return xa != xb ? xa < xb : rows[a] < rows[b];
    });
    if (x_(rows[order_.front()], f) == x_(rows[order_.back()], f)) return false;

    reset_right(rows, weights);
    double w_left = 0.0;
    for (std::size_t k = 0; k + 1 < order_.size(); ++k) {
      const std::size_t i = order_[k];
      move_left(rows[i], weights[i]);
      w_left += weights[i];
      const double here = x_(rows[i], f);
      const double next = x_(rows[order_[k + 1]], f);
      if (here == next) continue;
      const double w_right = total - w_left;
      if (w_left < params_.min_samples_leaf || w_right < params_.min_samples_leaf) continue;
      split_choice cand;
      cand.feature = f;
      cand.threshold = here + (next - here) / 2.0;
      if (!(cand.threshold < next)) cand.threshold = here;
      cand.score = left_sq_ / w_left + right_sq_ / w_right;
      if (better(cand, best)) best = cand;
    }
    return true;
  }

  void grow(const std::vector<int>& rows, const std::vector<double>& weights, int depth) {
    const int node = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);

    const bool depth_done = params_.max_depth > 0 && depth >= params_.max_depth;
    if (depth_done || total < 2.0 * params_.min_samples_leaf || pure(rows)) {
      make_leaf(node, rows, weights);
      return;
    }

    const double parent = node_score(rows, weights, total);
    const int nf = static_cast<int>(x_.cols());
    const int wanted = params_.max_features > 0 ? std::min(params_.max_features, nf) : nf;

    std::vector<int> features(static_cast<std::size_t>(nf));
    std::iota(features.begin(), features.end(), 0);
    if (wanted < nf) shuffle(std::span<int>(features), rng_);

    // Keep drawing features past max_features until a useful split exists.
    const double tol = 1e-12 * std::max(1.0, std::abs(parent));
    split_choice best;
    auto useful = [&] { return best.feature >= 0 && best.score - parent > tol; };
    int visited = 0;
    for (int f : features) {
      if (visited >= wanted && useful()) break;
      if (scan_feature(f, rows, weights, total, best)) ++visited;
    }
    if (!useful()) {
      make_leaf(node, rows, weights);
      return;
    }

    std::vector<int> lrows, rrows;
    std::vector<double> lw, rw;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (x_(rows[k], best.feature) <= best.threshold) {
        lrows.push_back(rows[k]);
        lw.push_back(weights[k]);
      } else {
        rrows.push_back(rows[k]);
        rw.push_back(weights[k]);
      }
    }
    tree_.nodes[node].feature = best.feature;
    tree_.nodes[node].threshold = best.threshold;
    const int left = static_cast<int>(tree_.nodes.size());
    tree_.nodes[node].left = left;
    grow(lrows, lw, depth + 1);
    tree_.nodes[node].right = static_cast<int>(tree_.nodes.size());
    grow(rrows, rw, depth + 1);
  }

  const matrix& x_;
  const compressed_targets& y_;
  tree_task task_;
  tree_params params_;
  rng_engine& rng_;
  decision_tree tree_;

  std::vector<std::uint8_t> labels_;
  std::vector<double> left_counts_, right_counts_;
  std::vector<double> left_sums_, right_sums_;
  double left_sq_ = 0.0, right_sq_ = 0.0;
  std::vector<std::size_t> order_;
};

}  // namespace detail

// Fits one tree on rows with positive weight.
inline decision_tree build_tree(const matrix& x, const compressed_targets& y, tree_task task,
                                const tree_params& params, const std::vector<double>& row_weights,
                                rng_engine& rng) {
  std::vector<int> rows;
  std::vector<double> weights;
  for (std::size_t i = 0; i < row_weights.size(); ++i) {
    if (row_weights[i] > 0.0) {
      rows.push_back(static_cast<int>(i));
      weights.push_back(row_weights[i]);
    }
  }
  detail::tree_builder builder(x, y, task, params, rng);
  return builder.build(std::move(rows), std::move(weights));
}

// Weighted mean of a leaf's rows, per distinct column.
inline void leaf_mean(const decision_tree& t, int leaf, const matrix& y, std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  double total = 0.0;
  for (int k = t.leaf_begin[leaf]; k < t.leaf_begin[leaf + 1]; ++k) {
    const double w = t.leaf_weights[k];
    total += w;
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += w * y(t.leaf_rows[k], static_cast<Eigen::Index>(c));
  }
  for (double& v : out) v /= total;
}

// Per distinct column, the weighted majority class of a leaf (ties -> lowest).
inline void leaf_vote(const decision_tree& t, int leaf, const matrix& y, std::vector<int>& out) {
  const std::size_t u = out.size();
  std::vector<double> counts(u * num_materials, 0.0);
  for (int k = t.leaf_begin[leaf]; k < t.leaf_begin[leaf + 1]; ++k) {
    const double w = t.leaf_weights[k];
    for (std::size_t c = 0; c < u; ++c)
      counts[c * num_materials + static_cast<int>(y(t.leaf_rows[k], static_cast<Eigen::Index>(c)))] += w;
  }
  for (std::size_t c = 0; c < u; ++c) {
    int best = 0;
    for (int m = 1; m < num_materials; ++m)
      if (counts[c * num_materials + m] > counts[c * num_materials + best]) best = m;
    out[c] = best;
  }
}

}  // namespace fssinv
