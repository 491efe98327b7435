#pragma once

// Single decision trees and bagged forests over compressed image targets.

#include <cmath>
#include <cstdint>
#include <vector>

#include "fssinv/models/tree.hpp"
#include "fssinv/parallel.hpp"
#include "fssinv/random.hpp"

namespace fssinv {

struct forest_params {
  int n_trees = 100;
  bool bootstrap = true;
  tree_params tree;
};

// One tree is a forest of size one without bootstrap.
struct tree_ensemble {
  tree_task task = tree_task::regression;
  compressed_targets targets;
  std::vector<decision_tree> trees;

  // Prediction in distinct-column space.
  std::vector<double> predict_compressed(const double* x) const {
    const std::size_t u = targets.map.distinct();
    std::vector<double> out(u, 0.0);
    if (task == tree_task::regression) {
      std::vector<double> leaf(u);
      for (const auto& t : trees) {
        leaf_mean(t, t.find_leaf(x), targets.values, leaf);
        for (std::size_t c = 0; c < u; ++c) out[c] += leaf[c];
      }
      for (double& v : out) v /= static_cast<double>(trees.size());
    } else {
      std::vector<int> vote(u);
      std::vector<int> tally(u * num_materials, 0);
      for (const auto& t : trees) {
        leaf_vote(t, t.find_leaf(x), targets.values, vote);
        for (std::size_t c = 0; c < u; ++c) ++tally[c * num_materials + vote[c]];
      }
      for (std::size_t c = 0; c < u; ++c) {
        int best = 0;
        for (int m = 1; m < num_materials; ++m)
          if (tally[c * num_materials + m] > tally[c * num_materials + best]) best = m;
        out[c] = best;
      }
    }
    return out;
  }
};

// Tree t draws its bootstrap and feature subsets from seed + t.
inline tree_ensemble fit_forest(const matrix& x, const matrix& y, tree_task task, const forest_params& params,
                                std::uint64_t seed) {
  tree_ensemble model;
  model.task = task;
  model.targets = compress_columns(y);
  model.trees.resize(static_cast<std::size_t>(params.n_trees));
  const std::size_t n = static_cast<std::size_t>(x.rows());
  parallel_for(model.trees.size(), [&](std::size_t t) {
    rng_engine rng(seed + t);
    std::vector<double> weights(n, 1.0);
    if (params.bootstrap) {
      std::fill(weights.begin(), weights.end(), 0.0);
      for (std::size_t k = 0; k < n; ++k) weights[uniform_index(rng, n)] += 1.0;
    }
    model.trees[t] = build_tree(x, model.targets, task, params.tree, weights, rng);
  });
  return model;
}

inline int default_max_features(tree_task task, int n_features) {
  if (task == tree_task::classification)
    return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_features))));
  return std::max(1, n_features / 3);
}

}  // namespace fssinv
