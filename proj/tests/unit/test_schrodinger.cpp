#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qrdm/errors.hpp"
#include "qrdm/schrodinger.hpp"

using namespace qrdm;

namespace {

constexpr double kPi = std::numbers::pi;

GridSpec box(double length, std::size_t n) { return GridSpec{-0.5 * length, length / static_cast<double>(n)}; }

// Smooth nodeless periodic wavefunction with `winding` turns of phase.
GridWavefunction random_smooth(std::mt19937_64& g, std::size_t n, int winding) {
  std::normal_distribution<double> nd;
  const GridSpec spec = box(20.0, n);
  std::vector<double> a(4), b(4), pa(4), pb(4);
  for (int m = 0; m < 4; ++m) {
    a[m] = 0.3 * nd(g) / (m + 1);
    b[m] = 0.3 * nd(g) / (m + 1);
    pa[m] = 2 * kPi * nd(g) / (m + 1);
    pb[m] = 2 * kPi * nd(g) / (m + 1);
  }
  std::vector<Complex> s(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = 2 * kPi * static_cast<double>(k) / static_cast<double>(n);
    double amp = 0, ph = winding * u;
    for (int m = 0; m < 4; ++m) {
      amp += a[m] * std::cos((m + 1) * u + pa[m]);
      ph += b[m] * std::sin((m + 1) * u + pb[m]);
    }
    s[k] = std::polar(std::exp(amp), ph);
  }
  return GridWavefunction::normalized(spec, std::move(s));
}

}  // namespace

TEST(Grid, RejectsInvalidSamples) {
  EXPECT_THROW(GridWavefunction(GridSpec{}, std::vector<Complex>(6, 1.0 / std::sqrt(6.0))), DimensionMismatch);
  EXPECT_THROW(GridWavefunction(GridSpec{}, std::vector<Complex>(9, 1.0 / 3.0)), DimensionMismatch);
  EXPECT_THROW(GridWavefunction(GridSpec{}, std::vector<Complex>(8, 1.0)), NormalizationError);
  EXPECT_NO_THROW(GridWavefunction(GridSpec{0, 0.125}, std::vector<Complex>(8, 1.0)));
}

TEST(Phases, ZeroTimeIsIdentity) {
  const std::vector<double> e{0.3, 1.7};
  const std::vector<double> p{0.4, 0.6};
  const auto s = EnergySuperposition::from_probabilities(e, p);
  const auto t = evolve_phases(s, 0.0);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(t.branches()[i].amplitude, s.branches()[i].amplitude);
}

TEST(Phases, PiSplitMakesOrthogonalState) {
  const std::vector<double> e{0.0, kPi};
  const std::vector<double> p{0.5, 0.5};
  const auto s = EnergySuperposition::from_probabilities(e, p);
  const auto t = evolve_phases(s, 1.0);
  Complex overlap = 0;
  for (std::size_t i = 0; i < 2; ++i) overlap += std::conj(t.branches()[i].amplitude) * s.branches()[i].amplitude;
  EXPECT_NEAR(std::abs(overlap), 0.0, 1e-15);
}

TEST(Phases, ProbabilitiesNeverChange) {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> e(5), p(5);
    double s = 0;
    for (int i = 0; i < 5; ++i) {
      e[i] = 10 * u(g);
      p[i] = u(g) + 0.01;
      s += p[i];
    }
    for (auto& v : p) v /= s;
    const auto a = EnergySuperposition::from_probabilities(e, p);
    const auto b = evolve_phases(a, 100 * u(g));
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(a.probabilities()[i], b.probabilities()[i], 1e-15);
  }
}

TEST(Evolve, ZeroStepsIsIdentity) {
  const auto psi = gaussian_packet(box(40, 256), 256, 0.0, 1.5, 0.4);
  const auto out = evolve_grid(psi, std::vector<double>(256, 0.0), 0.1, 0);
  EXPECT_EQ(out.samples(), psi.samples());
}

TEST(Evolve, PlaneWavePicksUpKineticPhase) {
  const std::size_t n = 128;
  const GridSpec spec = box(2 * kPi * 4, n);
  const double p = 1.5;  // 6 periods over the box
  const auto psi = plane_wave(spec, n, p);
  const double t = 1.3;
  const auto out = evolve_grid(psi, std::vector<double>(n, 0.0), t / 10, 10);
  const Complex phase = std::polar(1.0, -p * p * t / 2.0);
  for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(std::abs(out[k] - psi[k] * phase), 0.0, 1e-12);
}

TEST(Evolve, FreeGaussianMatchesAnalyticSolution) {
  const std::size_t n = 1024;
  const GridSpec spec = box(80, n);
  const double sigma = 1.0, p0 = 0.8, t = 3.0;
  const auto psi = gaussian_packet(spec, n, -5.0, sigma, p0);
  const auto out = evolve_grid(psi, std::vector<double>(n, 0.0), t / 30, 30);
  std::vector<Complex> ref(n);
  for (std::size_t k = 0; k < n; ++k) ref[k] = oracle::free_gaussian(spec.x0 + spec.dx * k, t, sigma, -5.0, p0);
  const auto exact = GridWavefunction::normalized(spec, ref);
  EXPECT_LT(l2_distance_up_to_phase(out, exact), 1e-8);
  EXPECT_NEAR(rms_width(out), oracle::gaussian_width(t, sigma), 1e-8);
  EXPECT_NEAR(mean_position(out), -5.0 + p0 * t, 1e-8);
}

TEST(Evolve, NormDriftStaysSmall) {
  const std::size_t n = 512;
  const GridSpec spec = box(60, n);
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = 0.5 * std::cos(0.3 * (spec.x0 + spec.dx * k));
  auto psi = gaussian_packet(spec, n, 0.0, 2.0, 1.0);
  auto one = evolve_grid(psi, v, 0.01, 1);
  EXPECT_LT(std::abs(one.norm() - 1.0), 1e-10);
  auto many = evolve_grid(psi, v, 0.01, 10000);
  EXPECT_LT(std::abs(many.norm() - 1.0), 1e-7);
}

TEST(Evolve, StepGuardRejectsLargePotentialSteps) {
  const auto psi = gaussian_packet(box(40, 256), 256, 0.0, 1.5, 0.0);
  EXPECT_THROW(evolve_grid(psi, std::vector<double>(256, 10.0), 0.05, 1), StepSizeError);
  std::vector<double> bad(256, 0.0);
  bad[3] = std::nan("");
  EXPECT_THROW(evolve_grid(psi, bad, 0.01, 1), ContractError);
}

TEST(Densities, RealWavefunctionHasNoFlux) {
  const auto psi = gaussian_packet(box(40, 256), 256, 1.0, 2.0, 0.0);
  for (double j : flux_density(psi)) EXPECT_EQ(j, 0.0);
  double s = 0;
  for (double r : position_density(psi)) {
    EXPECT_GE(r, 0.0);
    s += r;
  }
  EXPECT_NEAR(s * psi.dx(), 1.0, 1e-12);
}

TEST(Densities, PlaneWaveFluxConvergesToPOverML) {
  const double length = 2 * kPi * 5;
  const double p = 2.0;
  double prev = 0;
  for (std::size_t n : {128u, 256u, 512u, 1024u}) {
    const auto psi = plane_wave(box(length, n), n, p);
    const auto j = flux_density(psi);
    const double dx = psi.dx();
    // Discrete centered-difference form.
    EXPECT_NEAR(j[n / 3], std::sin(p * dx) / (dx * length), 1e-12);
    for (double r : position_density(psi)) EXPECT_NEAR(r, 1.0 / length, 1e-14);
    const double err = std::abs(j[0] - p / length);
    if (prev > 0) EXPECT_NEAR(prev / err, 4.0, 0.1);
    prev = err;
  }
}

TEST(Densities, IntegratedFluxIsConservedUnderFreeEvolution) {
  const std::size_t n = 1024;
  const GridSpec spec = box(80, n);
  const auto psi = gaussian_packet(spec, n, 0.0, 2.0, 1.0);
  auto total = [&](const GridWavefunction& w) {
    double s = 0;
    for (double j : flux_density(w)) s += j;
    return s * w.dx();
  };
  // Spectral oracle: dx sum j = <sin(k dx)> / dx for the discrete current.
  const auto f = oracle::dft(std::vector<oracle::cd>(psi.samples().begin(), psi.samples().end()));
  double num = 0, den = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double k = 2 * kPi * (i < n / 2 ? double(i) : double(i) - double(n)) / (n * spec.dx);
    num += std::norm(f[i]) * std::sin(k * spec.dx) / spec.dx;
    den += std::norm(f[i]);
  }
  EXPECT_NEAR(total(psi), num / den, 1e-10);
  const auto later = evolve_grid(psi, std::vector<double>(n, 0.0), 0.05, 100);
  EXPECT_NEAR(total(later), total(psi), 1e-8);
}

TEST(Continuity, StationaryStateHasZeroResidual) {
  const std::size_t n = 64;
  const auto psi = plane_wave(box(2 * kPi, n), n, 3.0);
  std::vector<GridWavefunction> series;
  for (int i = 0; i < 5; ++i) series.push_back(evolve_grid(psi, std::vector<double>(n, 0.0), 0.01, static_cast<std::size_t>(i)));
  EXPECT_LT(continuity_residual(series, 0.01), 1e-10);
}

TEST(Continuity, ResidualConvergesAtSecondOrder) {
  std::vector<double> res;
  for (std::size_t n : {256u, 512u, 1024u}) {
    const GridSpec spec = box(40, n);
    const double dt = 0.02 * 256.0 / static_cast<double>(n);
    const auto psi = gaussian_packet(spec, n, 0.0, 1.5, 1.0);
    std::vector<GridWavefunction> series;
    auto cur = psi;
    for (int i = 0; i < 5; ++i) {
      series.push_back(cur);
      cur = evolve_grid(cur, std::vector<double>(n, 0.0), dt, 1);
    }
    res.push_back(continuity_residual(series, dt));
  }
  EXPECT_NEAR(res[0] / res[1], 4.0, 0.6);
  EXPECT_NEAR(res[1] / res[2], 4.0, 0.6);
}

TEST(Continuity, CorruptedSeriesIsFlagged) {
  const std::size_t n = 256;
  const auto psi = gaussian_packet(box(40, n), n, 0.0, 1.5, 1.0);
  std::vector<std::vector<Complex>> raw;
  auto cur = psi;
  for (int i = 0; i < 5; ++i) {
    raw.push_back(cur.samples());
    cur = evolve_grid(cur, std::vector<double>(n, 0.0), 0.01, 1);
  }
  const double clean = continuity_residual(psi.spec(), raw, 0.01);
  for (auto& c : raw[2]) c *= 1.2;
  const double dirty = continuity_residual(psi.spec(), raw, 0.01);
  EXPECT_GT(dirty, 100 * clean);
  EXPECT_THROW(continuity_residual(psi.spec(), std::span(raw).first(2), 0.01), DomainError);
}

TEST(Reconstruct, RealGaussianFromZeroFlux) {
  const std::size_t n = 256;
  const auto psi = gaussian_packet(box(40, n), n, 0.0, 2.0, 0.0);
  const auto d = densities(psi);
  const auto back = reconstruct_wavefunction(d, 1.0, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    EXPECT_NEAR(back[k].imag(), 0.0, 1e-12);
    EXPECT_NEAR(back[k].real(), psi[k].real(), 1e-10);
  }
}

TEST(Reconstruct, BoostedGaussianRoundTrip) {
  const std::size_t n = 1024;
  const auto psi = gaussian_packet(box(60, n), n, 2.0, 2.5, 1.3);
  const auto back = reconstruct_wavefunction(densities(psi), 1.0, 1.0);
  EXPECT_LT(l2_distance_up_to_phase(psi, back), 1e-8);
}

TEST(Reconstruct, RandomNodelessRoundTrips) {
  std::mt19937_64 g(17);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto psi = random_smooth(g, 512, trial % 5 - 2);
    const auto d = densities(psi);
    const auto back = reconstruct_wavefunction(d, 1.0, 1.0);
    const auto r = densities(back);
    for (std::size_t k = 0; k < 512; ++k)
      worst = std::max({worst, std::abs(r.rho[k] - d.rho[k]), std::abs(r.j[k] - d.j[k])});
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(Reconstruct, FirstSupportPointIsRealPositive) {
  std::mt19937_64 g(2);
  const auto psi = random_smooth(g, 256, 1);
  const auto back = reconstruct_wavefunction(densities(psi), 1.0, 1.0);
  EXPECT_GT(back[0].real(), 0.0);
  EXPECT_NEAR(back[0].imag(), 0.0, 1e-14);
}

TEST(Reconstruct, NodeSplitsSupport) {
  const std::size_t n = 256;
  const GridSpec spec = box(40, n);
  std::vector<Complex> s(n, 0.0);
  // First excited state of a box occupying the middle half of the grid.
  for (std::size_t k = 64; k <= 192; ++k) s[k] = std::sin(2 * kPi * static_cast<double>(k - 64) / 128.0);
  s[128] = 0.0;
  const auto psi = GridWavefunction::normalized(spec, s);
  EXPECT_THROW(reconstruct_wavefunction(densities(psi), 1.0, 1.0), PhaseAmbiguity);
}

TEST(Dispersion, ZeroMomentumHasZeroResidual) { EXPECT_EQ(dispersion_check(0.0, 1.0, 1.0, 0.1), 0.0); }

TEST(Dispersion, SecondOrderInDx) {
  const double a = dispersion_check(1.3, 1.0, 1.0, 0.04);
  const double b = dispersion_check(1.3, 1.0, 1.0, 0.02);
  const double c = dispersion_check(1.3, 1.0, 1.0, 0.01);
  EXPECT_NEAR(a / b, 4.0, 0.1);
  EXPECT_NEAR(b / c, 4.0, 0.1);
}

TEST(Dispersion, WrongEnergyDoesNotConverge) {
  const double p = 1.3;
  const double a = dispersion_residual(p, 1.0, 1.0, 0.01, 0.01, p * p);
  const double b = dispersion_residual(p, 1.0, 1.0, 0.001, 0.001, p * p);
  EXPECT_GT(b, 0.5);
  EXPECT_NEAR(a / b, 1.0, 0.01);
}
