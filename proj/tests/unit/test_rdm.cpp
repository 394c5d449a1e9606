#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "qrdm/errors.hpp"
#include "qrdm/random.hpp"
#include "qrdm/rdm.hpp"
#include "qrdm/stats.hpp"

using namespace qrdm;

namespace {

double box_fraction(const StayTrajectory& t, IndexRange r) {
  std::size_t in = 0;
  for (auto s : t.stays) in += (s >= r.begin && s < r.end);
  return static_cast<double>(in) / static_cast<double>(t.instants());
}

}  // namespace

TEST(Stays, PointDistribution) {
  const std::vector<double> p{0, 0, 1, 0};
  const auto t = sample_stays(p, 1000, 3);
  for (auto s : t.stays) EXPECT_EQ(s, 2u);
  const auto h = empirical_density(t, 4, 4);
  EXPECT_EQ(h, (std::vector<double>{0, 0, 1, 0}));
}

TEST(Stays, RejectsUnnormalizedDensity) {
  const std::vector<double> p{0.5, 0.6};
  EXPECT_THROW(sample_stays(p, 10, 1), NormalizationError);
  const std::vector<double> q{0.5, 0.5};
  EXPECT_THROW(sample_stays(q, 0, 1), DomainError);
}

TEST(Stays, ReproducibleFromSeed) {
  const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
  EXPECT_EQ(sample_stays(p, 5000, 42).stays, sample_stays(p, 5000, 42).stays);
  EXPECT_NE(sample_stays(p, 5000, 42).stays, sample_stays(p, 5000, 43).stays);
}

TEST(Stays, UniformPassesChiSquare) {
  const std::size_t d = 16;
  const std::vector<double> p(d, 1.0 / d);
  const auto t = sample_stays(p, 100000, 9);
  std::vector<std::size_t> counts(d, 0);
  for (auto s : t.stays) ++counts[s];
  const auto r = stats::chi_square_gof(counts, p);
  EXPECT_EQ(r.dof, d - 1);
  EXPECT_GT(r.p_value, 0.001);
  EXPECT_NEAR(r.p_value, oracle::chi2_sf(r.statistic, r.dof), 1e-10);
}

TEST(Stays, TwoBoxFractionMatchesWeight) {
  const GridSpec spec{0.0, 0.1};
  const IndexRange b1{10, 60}, b2{140, 190};
  for (double a2 : {0.5, 0.3}) {
    const auto psi = two_box_state(spec, 200, b1, b2, a2);
    const auto t = sample_stays(psi, 100000, 77);
    EXPECT_NEAR(box_fraction(t, b1), a2, 3 * oracle::binomial_sigma(a2, 100000));
    EXPECT_NEAR(box_fraction(t, b1) + box_fraction(t, b2), 1.0, 1e-15);
  }
}

TEST(Density, TwoPeakHistogramTracksProfile) {
  const GridSpec spec{0.0, 0.1};
  const auto psi = two_box_state(spec, 200, {10, 60}, {140, 190}, 0.25);
  const auto t = sample_stays(psi, 400000, 5);
  const auto h = empirical_density(t, 200, 20);
  std::vector<double> exact(20, 0.0);
  for (std::size_t k = 0; k < 200; ++k) exact[k / 10] += std::norm(psi[k]) * spec.dx;
  for (std::size_t b = 0; b < 20; ++b) {
    const double sigma = std::sqrt(std::max(exact[b], 1e-12) / 400000.0);
    EXPECT_NEAR(h[b], exact[b], 5 * sigma + 1e-12) << b;
  }
  double w1 = 0;
  for (std::size_t b = 0; b < 10; ++b) w1 += h[b];
  EXPECT_NEAR(w1 / (1 - w1), 0.25 / 0.75, 0.02);
}

TEST(Density, HydrogenLikeProfileWithinPoissonBars) {
  const std::size_t n = 200;
  std::vector<double> p(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double r = 0.05 * static_cast<double>(k + 1);
    p[k] = r * r * std::exp(-2 * r);
  }
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& v : p) v /= s;
  const std::size_t draws = 1000000;
  const auto h = empirical_density(sample_stays(p, draws, 21), n, n);
  double worst = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double sigma = std::sqrt(p[k] / static_cast<double>(draws));
    if (sigma > 0) worst = std::max(worst, std::abs(h[k] - p[k]) / sigma);
  }
  EXPECT_LT(worst, 5.0);
}

TEST(Density, TotalVariationShrinksAsRootN) {
  const std::vector<double> p{0.05, 0.1, 0.2, 0.3, 0.15, 0.1, 0.07, 0.03};
  std::vector<double> ns{1e3, 1e4, 1e5}, tv;
  for (double n : ns) {
    double acc = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto t = sample_stays(p, static_cast<std::size_t>(n), derive_seed(99, seed));
      acc += stats::total_variation(p, empirical_density(t, 8, 8));
    }
    tv.push_back(acc / 20);
  }
  EXPECT_NEAR(stats::loglog_slope(ns, tv), -0.5, 0.1);
}

TEST(Charge, ScalesDensityAndIntegrates) {
  const GridSpec spec{0.0, 0.1};
  const auto psi = two_box_state(spec, 200, {10, 60}, {140, 190}, 0.3);
  for (double q : {0.0, 1.0, -1.0, 2.5}) {
    const auto c = effective_charge_density(psi, q);
    double total = 0, box1 = 0;
    for (std::size_t k = 0; k < 200; ++k) {
      total += c[k] * spec.dx;
      if (k >= 10 && k < 60) box1 += c[k] * spec.dx;
    }
    EXPECT_NEAR(total, q, 1e-8);
    EXPECT_NEAR(box1, 0.3 * q, 1e-12);
    if (q == 0.0)
      for (double v : c) EXPECT_EQ(v, 0.0);
  }
}

TEST(Entangled, BranchesAreSynchronized) {
  const std::vector<BranchRegions> b{{0.5, {0, 10}, {100, 110}}, {0.5, {40, 50}, {140, 150}}};
  const auto t = sample_entangled_stays(b, 100000, 8);
  std::size_t u = 0;
  for (std::size_t i = 0; i < t.instants(); ++i) {
    const bool p1u = t.stays1[i] < 10;
    const bool p2u = t.stays2[i] < 110;
    ASSERT_EQ(p1u, p2u);
    ASSERT_EQ(p1u, t.branches[i] == 0);
    u += p1u;
  }
  EXPECT_NEAR(static_cast<double>(u) / 1e5, 0.5, 3 * oracle::binomial_sigma(0.5, 100000));
}

TEST(Entangled, BranchFrequencyFollowsWeight) {
  for (double a2 : {1.0, 0.3}) {
    const std::vector<BranchRegions> b{{a2, {0, 10}, {100, 110}}, {1 - a2, {40, 50}, {140, 150}}};
    const auto t = sample_entangled_stays(b, 100000, 4);
    const double f = static_cast<double>(std::count(t.branches.begin(), t.branches.end(), 0)) / 1e5;
    if (a2 == 1.0)
      EXPECT_EQ(f, 1.0);
    else
      EXPECT_NEAR(f, a2, 3 * oracle::binomial_sigma(a2, 100000));
  }
}

TEST(Entangled, RejectsBadWeights) {
  const std::vector<BranchRegions> b{{0.6, {0, 10}, {100, 110}}, {0.6, {40, 50}, {140, 150}}};
  EXPECT_THROW(sample_entangled_stays(b, 10, 1), NormalizationError);
}

TEST(TwoBox, RejectsOverlap) {
  EXPECT_THROW(two_box_state(GridSpec{0, 0.1}, 200, {10, 60}, {50, 100}, 0.5), DomainError);
}
