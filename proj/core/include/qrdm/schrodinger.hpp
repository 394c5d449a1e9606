#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qrdm/hilbert.hpp"

namespace qrdm {

struct GridSpec {
  double x0 = 0;
  double dx = 1;
  double mass = 1;
  double hbar = 1;
};

inline constexpr double kGridNormTolerance = 1e-8;

class GridWavefunction {
 public:
  // Requires an even sample count >= 8, dx > 0 and dx sum |psi|^2 = 1 within 1e-8.
  GridWavefunction(GridSpec spec, std::vector<Complex> samples);
  static GridWavefunction normalized(GridSpec spec, std::vector<Complex> samples);

  const GridSpec& spec() const noexcept { return spec_; }
  double x0() const noexcept { return spec_.x0; }
  double dx() const noexcept { return spec_.dx; }
  double mass() const noexcept { return spec_.mass; }
  double hbar() const noexcept { return spec_.hbar; }
  std::size_t size() const noexcept { return samples_.size(); }
  double x(std::size_t k) const noexcept { return spec_.x0 + spec_.dx * static_cast<double>(k); }
  double length() const noexcept { return spec_.dx * static_cast<double>(samples_.size()); }
  const std::vector<Complex>& samples() const noexcept { return samples_; }
  Complex operator[](std::size_t k) const { return samples_[k]; }
  double norm() const;

 private:
  GridSpec spec_;
  std::vector<Complex> samples_;
};

struct DensityPair {
  GridSpec spec;
  std::vector<double> rho;
  std::vector<double> j;

  // rho >= 0, matching sizes, dx sum rho = 1 within 1e-8.
  void validate() const;
};

EnergySuperposition evolve_phases(const EnergySuperposition& s, double t, double hbar = 1.0);

// Symmetric split step on a periodic grid. Requires max|V| dt / hbar < 0.5.
GridWavefunction evolve_grid(const GridWavefunction& psi, std::span<const double> potential, double dt,
                             std::size_t steps);

std::vector<double> position_density(const GridWavefunction& psi);
std::vector<double> flux_density(const GridWavefunction& psi);
std::vector<double> flux_density(const GridSpec& spec, std::span<const Complex> samples);
DensityPair densities(const GridWavefunction& psi);

// Max of |d_t rho + d_x j| over interior snapshots, all grid points (periodic in x).
double continuity_residual(std::span<const GridWavefunction> series, double dt);
double continuity_residual(const GridSpec& spec, std::span<const std::vector<Complex>> series, double dt);

struct Reconstruction {
  GridWavefunction psi;
  std::size_t clamped_links = 0;
  double closure_residual = 0;
};

// Phase differences between neighbours are assumed to lie in (-pi/2, pi/2).
GridWavefunction reconstruct_wavefunction(const DensityPair& d, double mass, double hbar);
Reconstruction reconstruct_detailed(const DensityPair& d, double mass, double hbar);

// Max residual of the centered-difference free equation on e^{i(px - Et)/hbar}.
double dispersion_residual(double p, double mass, double hbar, double dx, double dt, double energy);
// E = p^2 / 2m, dt = dx.
double dispersion_check(double p, double mass, double hbar, double dx);

// Sample helpers.
GridWavefunction gaussian_packet(const GridSpec& spec, std::size_t n, double center, double width, double p0);
GridWavefunction plane_wave(const GridSpec& spec, std::size_t n, double p);
double mean_position(const GridWavefunction& psi);
double rms_width(const GridWavefunction& psi);
// Distance between normalized grid states minimized over a global phase.
double l2_distance_up_to_phase(const GridWavefunction& a, const GridWavefunction& b);

}  // namespace qrdm
