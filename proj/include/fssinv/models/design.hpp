#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "fssinv/error.hpp"
#include "fssinv/geometry.hpp"

namespace fssinv {

using matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using vector_d = Eigen::VectorXd;

// n samples x F spectral features, n x P image targets (P = side^2).
struct design_matrix {
  matrix x;
  matrix y;
  int image_size = 0;

  Eigen::Index rows() const { return x.rows(); }
  Eigen::Index features() const { return x.cols(); }
  Eigen::Index outputs() const { return y.cols(); }
};

inline void validate(const design_matrix& d, bool labels) {
  if (d.x.rows() < 1) throw spec_error("design matrix needs n >= 1");
  if (d.y.rows() != d.x.rows()) throw dimension_error("X and Y row counts differ");
  if (d.y.cols() != static_cast<Eigen::Index>(d.image_size) * d.image_size)
    throw dimension_error("Y width must equal image_size^2");
  for (Eigen::Index i = 0; i < d.x.size(); ++i) {
    const double v = d.x.data()[i];
    if (!(v >= 0.0 && v <= 1.0)) throw validation_error("feature values must lie in [0, 1]");
  }
  for (Eigen::Index i = 0; i < d.y.size(); ++i) {
    const double v = d.y.data()[i];
    if (!std::isfinite(v)) throw validation_error("targets must be finite");
    if (labels && !(v == 0.0 || v == 1.0 || v == 2.0))
      throw validation_error("classifier targets must be in {0, 1, 2}");
  }
}

// Identical target columns give identical per-output fits, so every model
// works on the distinct columns and expands at prediction time.
struct column_map {
  std::vector<int> pixel_to_column;  // length P
  std::vector<double> weight;        // multiplicity of each distinct column

  std::size_t distinct() const { return weight.size(); }
  std::size_t outputs() const { return pixel_to_column.size(); }

  template <typename Compressed>
  std::vector<double> expand(const Compressed& values) const {
    std::vector<double> out(pixel_to_column.size());
    for (std::size_t p = 0; p < out.size(); ++p) out[p] = values[pixel_to_column[p]];
    return out;
  }
};

struct compressed_targets {
  column_map map;
  matrix values;  // n x U
};

inline compressed_targets compress_columns(const matrix& y) {
  const Eigen::Index n = y.rows();
  const Eigen::Index p = y.cols();
  // Column-major copy so each column is contiguous for hashing.
  const Eigen::MatrixXd cols = y;
  auto hash_col = [&](Eigen::Index j) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto* bytes = reinterpret_cast<const unsigned char*>(cols.col(j).data());
    for (std::size_t k = 0; k < static_cast<std::size_t>(n) * sizeof(double); ++k) {
      h ^= bytes[k];
      h *= 0x100000001b3ULL;
    }
    return h;
  };

  compressed_targets out;
  out.map.pixel_to_column.resize(static_cast<std::size_t>(p));
  std::unordered_map<std::uint64_t, std::vector<int>> buckets;
  std::vector<Eigen::Index> representative;
  for (Eigen::Index j = 0; j < p; ++j) {
    auto& bucket = buckets[hash_col(j)];
    int found = -1;
    for (int u : bucket) {
      if (cols.col(representative[u]) == cols.col(j)) {
        found = u;
        break;
      }
    }
    if (found < 0) {
      found = static_cast<int>(representative.size());
      representative.push_back(j);
      out.map.weight.push_back(0.0);
      bucket.push_back(found);
    }
    out.map.pixel_to_column[j] = found;
    out.map.weight[found] += 1.0;
  }
  out.values.resize(n, static_cast<Eigen::Index>(representative.size()));
  for (std::size_t u = 0; u < representative.size(); ++u)
    out.values.col(static_cast<Eigen::Index>(u)) = cols.col(representative[u]);
  return out;
}

// Real-valued (regressors) or label-valued (classifiers) image prediction.
struct predicted_image {
  int size = 0;
  std::vector<double> values;
  bool labels = false;

  double operator()(int i, int j) const { return values[static_cast<std::size_t>(i) * size + j]; }
};

inline label_image to_label_image(const predicted_image& p) {
  if (!p.labels) throw spec_error("prediction is real-valued; threshold it first");
  label_image img(p.size);
  for (std::size_t k = 0; k < p.values.size(); ++k)
    img.labels()[k] = static_cast<std::uint8_t>(p.values[k]);
  return img;
}

}  // namespace fssinv
