#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fssinv/em_surrogate.hpp"

using namespace fssinv;

// Peak absorption of the mid-grid cell should sit near the sheet's series
// resonance evaluated from the closed-form L and C.
TEST(AbsorptionPeak, NearSeriesResonanceForMidGridCell) {
  const unit_cell_params q{1.75, 0.55, 1.25, 0.55};
  const layer_stack s;
  const double pi = std::numbers::pi;
  const double mm = 1e-3, p = 5.0 * mm;
  const double g = p - (2 * q.d + q.e) * mm;
  const double c = 8.8541878128e-12 * (s.eps_r + 1) / 2 * (2 * q.b * mm / pi) * std::log(1 / std::sin(pi * g / (2 * p)));
  const double l = 4e-7 * pi / (2 * pi) * 2 * q.d * mm * std::log(1 / std::sin(pi * q.c * mm / (2 * p)));
  const double f0 = 1 / (2 * pi * std::sqrt(l * s.kappa_c * c)) / 1e9;

  const frequency_grid grid;
  const auto a = absorption(q, s, cell_config{}, grid);
  const auto peak = grid[static_cast<std::size_t>(std::max_element(a.begin(), a.end()) - a.begin())];
  EXPECT_NEAR(peak, f0, 2.0);
}
