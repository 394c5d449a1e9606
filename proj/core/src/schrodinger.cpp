#include "qrdm/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "qrdm/errors.hpp"

namespace qrdm {

namespace {

double grid_norm(const GridSpec& spec, std::span<const Complex> samples) {
  double s = 0;
  for (const auto& c : samples) s += std::norm(c);
  return s * spec.dx;
}

void check_spec(const GridSpec& spec, std::size_t n) {
  if (n < 8 || n % 2 != 0) throw DimensionMismatch("grid needs an even sample count >= 8, got " + std::to_string(n));
  if (!(spec.dx > 0) || !std::isfinite(spec.dx)) throw DomainError("grid spacing must be positive");
  if (!(spec.mass > 0) || !(spec.hbar > 0)) throw DomainError("mass and hbar must be positive");
  if (!std::isfinite(spec.x0)) throw DomainError("grid origin must be finite");
}

}  // namespace

GridWavefunction::GridWavefunction(GridSpec spec, std::vector<Complex> samples)
    : spec_(spec), samples_(std::move(samples)) {
  check_spec(spec_, samples_.size());
  const double n = grid_norm(spec_, samples_);
  if (!std::isfinite(n) || std::abs(n - 1.0) > kGridNormTolerance)
    throw NormalizationError("grid wavefunction: dx sum |psi|^2 = " + std::to_string(n));
}

GridWavefunction GridWavefunction::normalized(GridSpec spec, std::vector<Complex> samples) {
  check_spec(spec, samples.size());
  const double n = grid_norm(spec, samples);
  if (!(n > 0) || !std::isfinite(n)) throw NormalizationError("grid wavefunction: cannot normalize");
  const double s = 1.0 / std::sqrt(n);
  for (auto& c : samples) c *= s;
  return GridWavefunction(spec, std::move(samples));
}

double GridWavefunction::norm() const { return grid_norm(spec_, samples_); }

void DensityPair::validate() const {
  check_spec(spec, rho.size());
  if (j.size() != rho.size()) throw DimensionMismatch("rho and j sizes differ");
  double s = 0;
  for (std::size_t k = 0; k < rho.size(); ++k) {
    if (!(rho[k] >= 0) || !std::isfinite(rho[k])) throw DomainError("rho must be finite and non-negative");
    if (!std::isfinite(j[k])) throw DomainError("j must be finite");
    s += rho[k];
  }
  s *= spec.dx;
  if (std::abs(s - 1.0) > kGridNormTolerance) throw NormalizationError("dx sum rho = " + std::to_string(s));
}

EnergySuperposition evolve_phases(const EnergySuperposition& s, double t, double hbar) {
  if (!(hbar > 0)) throw DomainError("hbar must be positive");
  std::vector<EnergyBranch> out = s.branches();
  for (auto& b : out) b.amplitude *= std::polar(1.0, -b.energy * t / hbar);
  return EnergySuperposition(std::move(out), s.unit_mode());
}

GridWavefunction evolve_grid(const GridWavefunction& psi, std::span<const double> potential, double dt,
                             std::size_t steps) {
  const std::size_t n = psi.size();
  if (potential.size() != n) throw DimensionMismatch("potential and grid sizes differ");
  if (steps == 0) return psi;
  if (!std::isfinite(dt)) throw StepSizeError("dt must be finite");
  const double hbar = psi.hbar();
  double vmax = 0;
  for (double v : potential) {
    if (!std::isfinite(v)) throw DomainError("potential must be finite");
    vmax = std::max(vmax, std::abs(v));
  }
  if (vmax * std::abs(dt) / hbar >= 0.5)
    throw StepSizeError("max|V| dt / hbar = " + std::to_string(vmax * std::abs(dt) / hbar) + " >= 0.5");

  detail::FftPair fft(n);
  const auto k = detail::wavenumbers(n, psi.dx());
  std::vector<Complex> kinetic(n), half_v(n), full_v(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    kinetic[i] = std::polar(inv_n, -hbar * k[i] * k[i] * dt / (2.0 * psi.mass()));
    half_v[i] = std::polar(1.0, -potential[i] * dt / (2.0 * hbar));
    full_v[i] = half_v[i] * half_v[i];
  }
  Complex* a = fft.data();
  std::copy(psi.samples().begin(), psi.samples().end(), a);
  for (std::size_t i = 0; i < n; ++i) a[i] *= half_v[i];
  for (std::size_t s = 0; s < steps; ++s) {
    fft.forward();
    for (std::size_t i = 0; i < n; ++i) a[i] *= kinetic[i];
    fft.backward();
    const auto& v = (s + 1 == steps) ? half_v : full_v;
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      a[i] *= v[i];
      acc += std::norm(a[i]);
    }
    if (!std::isfinite(acc)) throw NumericFailure("non-finite grid sample", s + 1);
  }
  return GridWavefunction(psi.spec(), std::vector<Complex>(a, a + n));
}

std::vector<double> position_density(const GridWavefunction& psi) {
  std::vector<double> rho(psi.size());
  for (std::size_t k = 0; k < psi.size(); ++k) rho[k] = std::norm(psi[k]);
  return rho;
}

std::vector<double> flux_density(const GridSpec& spec, std::span<const Complex> s) {
  const std::size_t n = s.size();
  std::vector<double> j(n);
  const double f = spec.hbar / (spec.mass * 2.0 * spec.dx);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex d = s[(k + 1) % n] - s[(k + n - 1) % n];
    j[k] = f * (std::conj(s[k]) * d).imag();
  }
  return j;
}

std::vector<double> flux_density(const GridWavefunction& psi) { return flux_density(psi.spec(), psi.samples()); }

DensityPair densities(const GridWavefunction& psi) { return {psi.spec(), position_density(psi), flux_density(psi)}; }

double continuity_residual(const GridSpec& spec, std::span<const std::vector<Complex>> series, double dt) {
  if (series.size() < 3) throw DomainError("continuity residual needs at least 3 snapshots");
  if (!(dt > 0)) throw StepSizeError("dt must be positive");
  const std::size_t n = series.front().size();
  for (const auto& f : series)
    if (f.size() != n) throw DimensionMismatch("snapshots differ in size");
  check_spec(spec, n);
  double worst = 0;
  for (std::size_t t = 1; t + 1 < series.size(); ++t) {
    const auto j = flux_density(spec, series[t]);
    for (std::size_t k = 0; k < n; ++k) {
      const double drho = (std::norm(series[t + 1][k]) - std::norm(series[t - 1][k])) / (2.0 * dt);
      const double dj = (j[(k + 1) % n] - j[(k + n - 1) % n]) / (2.0 * spec.dx);
      worst = std::max(worst, std::abs(drho + dj));
    }
  }
  return worst;
}

double continuity_residual(std::span<const GridWavefunction> series, double dt) {
  if (series.size() < 3) throw DomainError("continuity residual needs at least 3 snapshots");
  std::vector<std::vector<Complex>> raw;
  raw.reserve(series.size());
  for (const auto& s : series) raw.push_back(s.samples());
  return continuity_residual(series.front().spec(), raw, dt);
}

Reconstruction reconstruct_detailed(const DensityPair& d, double mass, double hbar) {
  d.validate();
  if (!(mass > 0) || !(hbar > 0)) throw DomainError("mass and hbar must be positive");
  const std::size_t n = d.rho.size();
  const double dx = d.spec.dx;
  const double rmax = *std::max_element(d.rho.begin(), d.rho.end());
  const double floor = 1e-24 * rmax;
  std::vector<bool> in(n);
  std::size_t count = 0;
  for (std::size_t k = 0; k < n; ++k) {
    in[k] = d.rho[k] > floor;
    count += in[k];
  }
  GridSpec spec = d.spec;
  spec.mass = mass;
  spec.hbar = hbar;
  Reconstruction out{GridWavefunction::normalized(spec, std::vector<Complex>(n, 1.0)), 0, 0};

  // Chain of support sites; link q joins chain[q] and chain[q + 1] (mod n).
  std::size_t start = 0;
  const bool periodic = count == n;
  if (!periodic) {
    std::size_t runs = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (in[k] && !in[(k + n - 1) % n]) {
        ++runs;
        start = k;
      }
    }
    if (runs != 1)
      throw PhaseAmbiguity("density vanishes inside the support; " + std::to_string(runs) + " disjoint regions");
  }
  const std::size_t links = periodic ? n : count - 1;
  auto site = [&](std::size_t q) { return (start + q) % n; };

  // Centered flux is the mean of the two adjacent link currents, so L_q = p_q + (-1)^q x.
  std::vector<double> p(links), g(links);
  for (std::size_t q = 0; q < links; ++q) {
    p[q] = q == 0 ? 0.0 : 2.0 * d.j[site(q)] - p[q - 1];
    g[q] = std::sqrt(d.rho[site(q)] * d.rho[site(q + 1)]);
  }
  const double c = mass * dx / hbar;
  auto sigma = [](std::size_t q) { return q % 2 == 0 ? 1.0 : -1.0; };
  // The alternating mode x is fixed by least squares: smooth link sines, weighted by density,
  // plus the no-inflow conditions at the edges of an open support.
  double num = 0, den = 0;
  auto add = [&](double w, double a, double b) {
    num += w * w * a * b;
    den += w * w * b * b;
  };
  for (std::size_t q = 0; q + 1 < links; ++q) {
    const double w = std::min(g[q], g[q + 1]);
    add(w, c * (p[q + 1] / g[q + 1] - p[q] / g[q]), c * (sigma(q + 1) / g[q + 1] - sigma(q) / g[q]));
  }
  if (!periodic && links > 0) {
    const std::size_t last = links - 1;
    add(g[0], c * (p[0] - 2.0 * d.j[site(0)]) / g[0], c * sigma(0) / g[0]);
    add(g[last], c * (p[last] - 2.0 * d.j[site(count - 1)]) / g[last], c * sigma(last) / g[last]);
  }
  const double x = den > 0 ? -num / den : 0.0;

  std::vector<double> theta(n, 0.0);
  double th = 0;
  for (std::size_t q = 0; q < links; ++q) {
    double sn = c * (p[q] + sigma(q) * x) / g[q];
    if (std::abs(sn) > 1.0) {
      ++out.clamped_links;
      sn = std::clamp(sn, -1.0, 1.0);
    }
    if (periodic && q + 1 == links) break;
    th += std::asin(sn);
    theta[site(q + 1)] = th;
  }
  if (periodic) {
    out.closure_residual = links > 0 ? std::abs(p[links - 1] + sigma(links - 1) * x + x - 2.0 * d.j[0]) : 0.0;
  } else {
    const std::size_t last = count - 1;
    out.closure_residual = links > 0 ? std::abs(p[links - 1] + sigma(links - 1) * x - 2.0 * d.j[site(last)]) : 0.0;
    // Outside the support the phase of the nearest support edge keeps edge links current-free.
    for (std::size_t q = 0; q < n - count; ++q) {
      const std::size_t k = (site(last) + 1 + q) % n;
      theta[k] = (q < (n - count + 1) / 2) ? theta[site(last)] : theta[start];
    }
  }
  std::vector<Complex> samples(n);
  for (std::size_t k = 0; k < n; ++k) samples[k] = std::polar(std::sqrt(d.rho[k]), theta[k]);
  out.psi = GridWavefunction::normalized(spec, std::move(samples));
  return out;
}

GridWavefunction reconstruct_wavefunction(const DensityPair& d, double mass, double hbar) {
  return reconstruct_detailed(d, mass, hbar).psi;
}

double dispersion_residual(double p, double mass, double hbar, double dx, double dt, double energy) {
  if (!(dx > 0) || !(dt > 0)) throw StepSizeError("dx and dt must be positive");
  auto wave = [&](double x, double t) { return std::polar(1.0, (p * x - energy * t) / hbar); };
  double worst = 0;
  for (int i = 0; i < 16; ++i) {
    const double x = i * 0.37;
    const Complex dt_term = Complex(0, hbar) * (wave(x, dt) - wave(x, -dt)) / (2.0 * dt);
    const Complex lap = (wave(x + dx, 0) - 2.0 * wave(x, 0) + wave(x - dx, 0)) / (dx * dx);
    worst = std::max(worst, std::abs(dt_term + hbar * hbar / (2.0 * mass) * lap));
  }
  return worst;
}

double dispersion_check(double p, double mass, double hbar, double dx) {
  return dispersion_residual(p, mass, hbar, dx, dx, p * p / (2.0 * mass));
}

GridWavefunction gaussian_packet(const GridSpec& spec, std::size_t n, double center, double width, double p0) {
  if (!(width > 0)) throw DomainError("packet width must be positive");
  std::vector<Complex> s(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = spec.x0 + spec.dx * static_cast<double>(k);
    const double u = (x - center) / width;
    s[k] = std::polar(std::exp(-0.25 * u * u), p0 * x / spec.hbar);
  }
  return GridWavefunction::normalized(spec, std::move(s));
}

GridWavefunction plane_wave(const GridSpec& spec, std::size_t n, double p) {
  std::vector<Complex> s(n);
  for (std::size_t k = 0; k < n; ++k) s[k] = std::polar(1.0, p * (spec.x0 + spec.dx * static_cast<double>(k)) / spec.hbar);
  return GridWavefunction::normalized(spec, std::move(s));
}

double mean_position(const GridWavefunction& psi) {
  double m = 0;
  for (std::size_t k = 0; k < psi.size(); ++k) m += psi.x(k) * std::norm(psi[k]);
  return m * psi.dx();
}

double rms_width(const GridWavefunction& psi) {
  const double m = mean_position(psi);
  double v = 0;
  for (std::size_t k = 0; k < psi.size(); ++k) v += (psi.x(k) - m) * (psi.x(k) - m) * std::norm(psi[k]);
  return std::sqrt(v * psi.dx());
}

double l2_distance_up_to_phase(const GridWavefunction& a, const GridWavefunction& b) {
  if (a.size() != b.size()) throw DimensionMismatch("grids differ in size");
  Complex overlap = 0;
  for (std::size_t k = 0; k < a.size(); ++k) overlap += std::conj(a[k]) * b[k];
  const Complex align = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : Complex(1.0);
  double acc = 0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::norm(a[k] * align - b[k]);
  return std::sqrt(acc * a.dx());
}

}  // namespace qrdm
