#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "cproc/baseline.hpp"
#include "cproc/error.hpp"
#include "cproc/rocbands.hpp"

using namespace cproc;

TEST(Percentile, LinearInterpolation) {
  EXPECT_DOUBLE_EQ(percentile({4, 1, 3, 2}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(percentile({4, 1, 3, 2}, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(percentile({4, 1, 3, 2}, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(percentile({10, 20}, 0.025), 10.25);
  EXPECT_THROW(percentile({}, 0.5), ArgumentError);
}

TEST(Bootstrap, PerfectSeparationGivesDegenerateBand) {
  const std::vector<double> s{0.9, 0.8, 0.95, 0.1, 0.2, 0.15};
  const std::vector<int> y{1, 1, 1, 0, 0, 0};
  const auto grid = uniform_grid(11);
  const auto b = bootstrap_bands(s, y, grid, 200, 0.95, 1);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (grid[g] > 0.2 && grid[g] < 0.8) {
      EXPECT_EQ(b.tpr_lo[g], 1.0);
      EXPECT_EQ(b.fpr_up[g], 0.0);
    }
  }
}

TEST(Bootstrap, SingleResampleIsAPointCurve) {
  const std::vector<double> s{0.9, 0.4, 0.6, 0.1, 0.5, 0.3};
  const std::vector<int> y{1, 1, 1, 0, 0, 0};
  const auto grid = uniform_grid(21);
  const auto b = bootstrap_bands(s, y, grid, 1, 0.9, 7);
  EXPECT_EQ(b.tpr_lo, b.tpr_up);
  EXPECT_EQ(b.fpr_lo, b.fpr_up);
}

TEST(Bootstrap, DeterministicAndThreadIndependent) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> s(200);
  std::vector<int> y(200);
  for (std::size_t i = 0; i < s.size(); ++i) {
    y[i] = i % 4 == 0;
    s[i] = std::min(1.0, u(rng) * 0.8 + 0.2 * y[i]);
  }
  const auto grid = uniform_grid(64);
  const auto a = bootstrap_bands(s, y, grid, 300, 0.95, 11, 1);
  const auto b = bootstrap_bands(s, y, grid, 300, 0.95, 11, 3);
  EXPECT_EQ(a.tpr_lo, b.tpr_lo);
  EXPECT_EQ(a.fpr_up, b.fpr_up);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    EXPECT_LE(a.tpr_lo[g], a.tpr_up[g]);
    EXPECT_LE(a.fpr_lo[g], a.fpr_up[g]);
  }
}

TEST(Bootstrap, Errors) {
  const std::vector<double> s{0.1, 0.2};
  const std::vector<int> one{1, 1}, both{1, 0};
  const auto grid = uniform_grid(4);
  EXPECT_THROW(bootstrap_bands(s, one, grid, 10, 0.95, 0), DegenerateTestError);
  EXPECT_THROW(bootstrap_bands(s, both, grid, 0, 0.95, 0), ArgumentError);
  EXPECT_THROW(bootstrap_bands(s, both, grid, 10, 1.5, 0), ArgumentError);
}

TEST(Bootstrap, CsvUsesBandSchema) {
  const std::vector<double> s{0.9, 0.4, 0.6, 0.1};
  const std::vector<int> y{1, 1, 0, 0};
  std::stringstream ss;
  write_bootstrap_csv(ss, bootstrap_bands(s, y, uniform_grid(8), 20, 0.95, 0));
  const auto band = read_band_csv(ss);
  EXPECT_EQ(band.lambda.size(), 8u);
}
