#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "fssinv/dataset.hpp"
#include "fssinv/postprocess.hpp"
#include "fssinv/random.hpp"

using namespace fssinv;

namespace {

std::vector<double> as_real(const label_image& img) {
  return {img.labels().begin(), img.labels().end()};
}

label_image random_labels(rng_engine& rng, int n) {
  label_image img(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) img(i, j) = static_cast<std::uint8_t>(uniform_index(rng, 3));
  return img;
}

}  // namespace

TEST(Threshold, CaseBoundaries) {
  EXPECT_EQ(case_1.lower, 0.4);
  EXPECT_EQ(case_1.upper, 1.6);
  EXPECT_EQ(case_2.lower, 0.5);
  EXPECT_EQ(case_2.upper, 1.5);
  EXPECT_EQ(case_3.lower, 0.6);
  EXPECT_EQ(case_3.upper, 1.4);
  EXPECT_EQ(threshold_case_by_id(3).upper, 1.4);
  EXPECT_THROW(threshold_case_by_id(4), config_error);
}

TEST(Threshold, CaseExamples) {
  EXPECT_EQ(threshold_value(0.3, case_2), 0);
  EXPECT_EQ(threshold_value(1.2, case_2), 1);
  EXPECT_EQ(threshold_value(1.7, case_2), 2);
  EXPECT_EQ(threshold_value(0.45, case_1), 1);
  EXPECT_EQ(threshold_value(0.45, case_2), 0);
  EXPECT_EQ(threshold_value(1.45, case_3), 2);
  EXPECT_EQ(threshold_value(1.45, case_2), 1);
}

TEST(Threshold, BoundariesBelongToClassOne) {
  for (const auto& tc : {case_1, case_2, case_3}) {
    EXPECT_EQ(threshold_value(tc.lower, tc), 1);
    EXPECT_EQ(threshold_value(tc.upper, tc), 1);
    EXPECT_EQ(threshold_value(std::nextafter(tc.lower, 0.0), tc), 0);
    EXPECT_EQ(threshold_value(std::nextafter(tc.upper, 3.0), tc), 2);
  }
}

TEST(Threshold, ExactLabelsUnchanged) {
  rng_engine rng(1);
  for (int k = 0; k < 20; ++k) {
    const auto img = random_labels(rng, 16);
    for (const auto& tc : {case_1, case_2, case_3}) EXPECT_EQ(threshold(as_real(img), 16, tc), img);
  }
}

TEST(Threshold, NonFinitePixelNamesCoordinates) {
  std::vector<double> v(16, 1.0);
  v[2 * 4 + 3] = std::numeric_limits<double>::quiet_NaN();
  try {
    threshold(v, 4, case_2);
    FAIL();
  } catch (const validation_error& e) {
    EXPECT_NE(std::string(e.what()).find("(2, 3)"), std::string::npos);
  }
  v[2 * 4 + 3] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(threshold(v, 4, case_2), validation_error);
  EXPECT_THROW(threshold(v, 5, case_2), dimension_error);
}

TEST(Threshold, RecoversLabelsUnderBoundedNoise) {
  rng_engine rng(2);
  for (int k = 0; k < 100; ++k) {
    const auto img = random_labels(rng, 24);
    auto noisy = as_real(img);
    for (auto& v : noisy) v += 0.9 * uniform_unit(rng) - 0.45;
    ASSERT_EQ(threshold(noisy, 24, case_2), img);
  }
}

TEST(Threshold, IdempotentAndMonotone) {
  rng_engine rng(3);
  for (int k = 0; k < 1000; ++k) {
    std::vector<double> a(64), b(64);
    for (std::size_t i = 0; i < 64; ++i) {
      a[i] = 3.0 * uniform_unit(rng) - 0.5;
      b[i] = a[i] + uniform_unit(rng);
    }
    for (const auto& tc : {case_1, case_2, case_3}) {
      const auto once = threshold(a, 8, tc);
      ASSERT_EQ(threshold(as_real(once), 8, tc), once);
      const auto upper = threshold(b, 8, tc);
      for (std::size_t i = 0; i < 64; ++i) ASSERT_GE(upper.labels()[i], once.labels()[i]);
    }
  }
}

TEST(Extract, RecoversNonMergedGridAtHighResolution) {
  cell_config cfg;
  cfg.resolution = 400;
  const double h = cfg.pixel_pitch();
  int checked = 0;
  for (const auto& q : table1_grid()) {
    if (caps_merged(q)) continue;
    const auto ex = extract_params(rasterize(q, cfg), cfg);
    ASSERT_LE(std::abs(ex.params.b - q.b), h) << q.b << " " << q.c << " " << q.d << " " << q.e;
    ASSERT_LE(std::abs(ex.params.c - q.c), h);
    ASSERT_LE(std::abs(ex.params.d - q.d), h);
    ASSERT_LE(std::abs(ex.params.e - q.e), h);
    EXPECT_FALSE(ex.merged);
    EXPECT_EQ(ex.uncertainty.b, h);
    ++checked;
  }
  EXPECT_EQ(checked, 378 - 141);
}

// At N = 64 a cap of width b = 0.85 and a shaft of width c = 0.75 both
// cover ten pixel rows, so the cap cannot be told apart from the shaft.
TEST(Extract, DefaultResolutionRecoversOrReportsDegenerate) {
  cell_config cfg;
  const double h = cfg.pixel_pitch();
  int degenerate = 0;
  for (const auto& q : table1_grid()) {
    if (caps_merged(q)) continue;
    const auto img = rasterize(q, cfg);
    if (q.b == 0.85 && q.c == 0.75) {
      EXPECT_THROW(extract_params(img, cfg), extraction_error);
      ++degenerate;
      continue;
    }
    const auto ex = extract_params(img, cfg);
    ASSERT_LE(std::abs(ex.params.b - q.b), h);
    ASSERT_LE(std::abs(ex.params.c - q.c), h);
    ASSERT_LE(std::abs(ex.params.d - q.d), h);
    ASSERT_LE(std::abs(ex.params.e - q.e), h);
    ASSERT_EQ(snap_to_grid(ex.params), q);
  }
  EXPECT_EQ(degenerate, 16);
}

TEST(Extract, AllSubstrateIsExtractionError) {
  EXPECT_THROW(extract_params(label_image(64), cell_config{}), extraction_error);
}

TEST(Extract, MissingCapIsDegenerate) {
  label_image img(64);
  for (int i = 28; i < 36; ++i)
    for (int j = 0; j < 64; ++j) img(i, j) = 2;
  EXPECT_THROW(extract_params(img, cell_config{}), error);
}

TEST(Extract, MergedCapsFlagged) {
  cell_config cfg;
  cfg.resolution = 400;
  const auto ex = extract_params(rasterize({2.55, 0.25, 0.65, 0.75}, cfg), cfg);
  EXPECT_TRUE(ex.merged);
}

TEST(Snap, NearestGridValue) {
  EXPECT_EQ(snap_to_grid({0.99, 0.26, 0.64, 0.74}), (unit_cell_params{0.85, 0.25, 0.65, 0.75}));
  EXPECT_EQ(snap_to_grid({1.00, 0.25, 0.65, 0.25}).b, 0.85);
  EXPECT_EQ(snap_to_grid({0.85, 0.40, 0.80, 0.40}), (unit_cell_params{0.85, 0.25, 0.65, 0.25}));
  EXPECT_EQ(snap_to_grid({9.0, -1.0, 1.90, 0.65}), (unit_cell_params{2.55, 0.25, 1.85, 0.55}));
  for (const auto& q : table1_grid()) ASSERT_EQ(snap_to_grid(q), q);
}
