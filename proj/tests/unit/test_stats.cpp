#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "qrdm/random.hpp"
#include "qrdm/stats.hpp"

using namespace qrdm;

TEST(Seeds, DistinctAndStable) {
  EXPECT_NE(derive_seed(7, 0), derive_seed(7, 1));
  EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
  EXPECT_NE(derive_seed(7, 3), derive_seed(8, 3));
}

TEST(Seeds, NoCollisions) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(derive_seed(2024, i));
  EXPECT_EQ(seen.size(), 10000u);
}

TEST(Seeds, SplitMixRecipe) {
  // Hand expansion of the documented recipe.
  std::uint64_t z = 5 + 3 * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  EXPECT_EQ(derive_seed(5, 2), z);
}

TEST(Rng, UniformRangeAndPick) {
  Rng r(1);
  double lo = 1, hi = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  EXPECT_GE(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  const std::vector<double> cdf{0.0, 0.0, 1.0};
  for (int i = 0; i < 100; ++i) EXPECT_EQ(r.pick(cdf), 2u);
}

TEST(ChiSquare, SurvivalMatchesOracle) {
  for (std::size_t dof : {1u, 2u, 5u, 9u, 30u})
    for (double x : {0.1, 1.0, 4.5, 12.0, 40.0}) EXPECT_NEAR(stats::chi_square_sf(x, dof), oracle::chi2_sf(x, dof), 1e-10);
  EXPECT_NEAR(stats::chi_square_sf(3.841458820694124, 1), 0.05, 1e-9);
}

TEST(ChiSquare, ExactFitAndZeroBins) {
  const std::vector<std::size_t> counts{25, 25, 0, 50};
  const std::vector<double> p{0.25, 0.25, 0.0, 0.5};
  const auto r = stats::chi_square_gof(counts, p);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.dof, 2u);
  EXPECT_NEAR(r.p_value, 1.0, 1e-12);
}

TEST(Kolmogorov, KnownQuantiles) {
  EXPECT_NEAR(stats::kolmogorov_sf(1.3580986393225505), 0.05, 1e-6);
  EXPECT_NEAR(stats::kolmogorov_sf(1.6276236115189506), 0.01, 1e-6);
  EXPECT_NEAR(stats::kolmogorov_sf(0.0), 1.0, 1e-12);
}

TEST(Kolmogorov, TwoSampleStatistic) {
  const auto same = stats::ks_two_sample({1, 2, 3, 4}, {1, 2, 3, 4});
  EXPECT_EQ(same.statistic, 0.0);
  const auto apart = stats::ks_two_sample({1, 2, 3}, {10, 11, 12});
  EXPECT_EQ(apart.statistic, 1.0);
  const auto half = stats::ks_two_sample({1, 2, 3, 4}, {3, 4, 5, 6});
  EXPECT_NEAR(half.statistic, 0.5, 1e-15);
}

TEST(Descriptive, MeanMedianSe) {
  const std::vector<double> x{1, 2, 3, 4, 10};
  EXPECT_EQ(stats::mean(x), 4.0);
  EXPECT_EQ(stats::median(x), 3.0);
  EXPECT_EQ(stats::median({4, 1, 3, 2}), 2.5);
  EXPECT_NEAR(stats::standard_error(x), std::sqrt(12.5 / 5), 1e-14);
}

TEST(Descriptive, TotalVariationAndSlope) {
  const std::vector<double> p{0.5, 0.5}, q{1.0, 0.0};
  EXPECT_NEAR(stats::total_variation(p, q), 0.5, 1e-15);
  const std::vector<double> x{1, 10, 100}, y{3, 0.3, 0.03};
  EXPECT_NEAR(stats::loglog_slope(x, y), -1.0, 1e-12);
}
