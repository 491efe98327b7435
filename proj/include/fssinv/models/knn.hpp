#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "fssinv/models/design.hpp"

namespace fssinv {

// k-nearest-neighbour classifier: Euclidean distance on raw spectra,
// distance ties resolved by lower training row, per-pixel majority vote
// with ties going to the lowest class.
struct knn_classifier {
  int k = 5;
  matrix x;
  std::vector<std::uint8_t> labels;  // n x P, row-major
  std::size_t outputs = 0;

  static knn_classifier fit(const matrix& x, const matrix& y, int k) {
    knn_classifier m;
    m.k = k;
    m.x = x;
    m.outputs = static_cast<std::size_t>(y.cols());
    m.labels.resize(static_cast<std::size_t>(y.size()));
    for (Eigen::Index i = 0; i < y.size(); ++i) m.labels[i] = static_cast<std::uint8_t>(y.data()[i]);
    return m;
  }

  std::vector<int> neighbours(const double* q) const {
    const auto n = static_cast<std::size_t>(x.rows());
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (Eigen::Index f = 0; f < x.cols(); ++f) {
        const double d = x(static_cast<Eigen::Index>(i), f) - q[f];
        s += d * d;
      }
      dist[i] = s;
    }
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    const auto kk = static_cast<std::ptrdiff_t>(std::min<std::size_t>(static_cast<std::size_t>(k), n));
    std::partial_sort(idx.begin(), idx.begin() + kk, idx.end(), [&](int a, int b) {
      return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
    });
    idx.resize(static_cast<std::size_t>(kk));
    return idx;
  }

  std::vector<double> predict(const double* q) const {
    const auto nn = neighbours(q);
    std::vector<double> out(outputs);
    for (std::size_t p = 0; p < outputs; ++p) {
      int votes[num_materials] = {0, 0, 0};
      for (int i : nn) ++votes[labels[static_cast<std::size_t>(i) * outputs + p]];
      int best = 0;
      for (int m = 1; m < num_materials; ++m)
        if (votes[m] > votes[best]) best = m;
      out[p] = best;
    }
    return out;
  }
};

}  // namespace fssinv
