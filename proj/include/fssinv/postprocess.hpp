#pragma once

// Quantisation of real-valued predicted images and recovery of unit-cell
// parameters from label images.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fssinv/error.hpp"
#include "fssinv/geometry.hpp"
#include "fssinv/models/design.hpp"

namespace fssinv {

struct threshold_case {
  int id = 2;
  double lower = 0.5;
  double upper = 1.5;
};

inline constexpr threshold_case case_1{1, 0.4, 1.6};
inline constexpr threshold_case case_2{2, 0.5, 1.5};
inline constexpr threshold_case case_3{3, 0.6, 1.4};

inline threshold_case threshold_case_by_id(int id) {
  switch (id) {
    case 1: return case_1;
    case 2: return case_2;
    case 3: return case_3;
  }
  throw config_error("threshold case must be 1, 2 or 3, got " + std::to_string(id));
}

// v < lower -> 0, lower <= v <= upper -> 1, v > upper -> 2.
inline std::uint8_t threshold_value(double v, const threshold_case& tc) {
  if (v < tc.lower) return 0;
  if (v > tc.upper) return 2;
  return 1;
}

inline label_image threshold(std::span<const double> values, int size, const threshold_case& tc) {
  if (values.size() != static_cast<std::size_t>(size) * size) throw dimension_error("image size mismatch");
  label_image out(size);
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      const double v = values[static_cast<std::size_t>(i) * size + j];
      if (!std::isfinite(v))
        throw validation_error("non-finite pixel at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      out(i, j) = threshold_value(v, tc);
    }
  }
  return out;
}

inline label_image threshold(const predicted_image& img, const threshold_case& tc) {
  return threshold(img.values, img.size, tc);
}

struct extracted_params {
  unit_cell_params params;
  unit_cell_params uncertainty;  // one pixel pitch per parameter, mm
  bool merged = false;
};

// Measures the +x arm of a Jerusalem cross. Resistive pixels count as metal.
//
//  - v(j): length of the metal run in column j that contains the row just
//    above the centre (zero when that pixel is substrate);
//  - s: rightmost metal column on that row (the outer edge of the cap);
//  - c: the smallest positive v between the centre and s (a bare shaft column);
//  - the cap is the rightmost contiguous group of columns, ending at s, whose
//    v exceeds c; e is its width, d the centre of its x-extent and b the
//    largest v inside it.
inline extracted_params extract_params(const label_image& img, const cell_config& cfg) {
  const int n = img.size();
  if (n != cfg.resolution) throw dimension_error("image resolution does not match the cell config");
  const double h = cfg.pixel_pitch();
  const auto& lab = img.labels();
  if (std::none_of(lab.begin(), lab.end(), [](std::uint8_t v) { return v == 2; }))
    throw extraction_error("no conductor pixels in image");

  auto metal = [&](int i, int j) { return img(i, j) != 0; };
  const int row = n / 2 - 1;
  const int first = n / 2;  // first column with x > 0

  std::vector<int> run(static_cast<std::size_t>(n), 0);
  int outer = -1;
  for (int j = first; j < n; ++j) {
    if (!metal(row, j)) continue;
    outer = j;
    int top = row, bottom = row;
    while (top > 0 && metal(top - 1, j)) --top;
    while (bottom + 1 < n && metal(bottom + 1, j)) ++bottom;
    run[j] = bottom - top + 1;
  }
  if (outer < 0) throw extraction_error("no metal on the centre row");

  int shaft = std::numeric_limits<int>::max();
  for (int j = first; j <= outer; ++j)
    if (run[j] > 0) shaft = std::min(shaft, run[j]);

  int cap_lo = outer;
  while (cap_lo - 1 >= first && run[cap_lo - 1] > shaft) --cap_lo;
  if (run[outer] <= shaft || cap_lo == first)
    throw extraction_error("degenerate geometry: no end cap separable from the shaft");

  int cap_span = 0;
  for (int j = cap_lo; j <= outer; ++j) cap_span = std::max(cap_span, run[j]);

  auto x_of = [&](int j) { return pixel_offset(j, n) * h; };
  extracted_params out;
  out.params.e = (outer - cap_lo + 1) * h;
  out.params.d = (x_of(cap_lo) + x_of(outer)) / 2.0;
  out.params.b = cap_span * h;
  out.params.c = shaft * h;
  out.uncertainty = {h, h, h, h};
  out.merged = caps_merged(out.params);
  return out;
}

namespace detail {

template <std::size_t N>
double snap(double v, const std::array<double, N>& values) {
  constexpr double tie_tol = 1e-9;
  double best = values[0];
  double best_dist = std::abs(v - best);
  for (std::size_t k = 1; k < N; ++k) {
    const double dist = std::abs(v - values[k]);
    // Values are ascending, so on a tie the earlier (smaller) one is kept.
    if (dist < best_dist - tie_tol) {
      best = values[k];
      best_dist = dist;
    }
  }
  return best;
}

}  // namespace detail

inline unit_cell_params snap_to_grid(const unit_cell_params& q) {
  return {detail::snap(q.b, grid_b), detail::snap(q.c, grid_c), detail::snap(q.d, grid_d),
          detail::snap(q.e, grid_e)};
}

}  // namespace fssinv
