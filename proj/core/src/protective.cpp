#include "qrdm/protective.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "fft.hpp"
#include "qrdm/errors.hpp"

namespace qrdm {

namespace {

struct MomentumPointer {
  std::vector<double> k;
  std::vector<Complex> chi;  // unnormalized forward transform
  std::vector<std::size_t> active;
  std::vector<double> weight;  // |chi|^2 / sum, on the active set
};

MomentumPointer to_momentum(const GridWavefunction& g) {
  const std::size_t n = g.size();
  detail::FftPair fft(n);
  std::copy(g.samples().begin(), g.samples().end(), fft.data());
  fft.forward();
  MomentumPointer m;
  m.k = detail::wavenumbers(n, g.dx());
  m.chi.assign(fft.data(), fft.data() + n);
  double peak = 0, total = 0;
  for (const auto& c : m.chi) {
    peak = std::max(peak, std::norm(c));
    total += std::norm(c);
  }
  for (std::size_t i = 0; i < n; ++i)
    if (std::norm(m.chi[i]) > 1e-32 * peak) m.active.push_back(i);
  for (auto i : m.active) m.weight.push_back(std::norm(m.chi[i]) / total);
  return m;
}

GridWavefunction from_momentum(const GridSpec& spec, const std::vector<Complex>& chi) {
  const std::size_t n = chi.size();
  detail::FftPair fft(n);
  std::copy(chi.begin(), chi.end(), fft.data());
  fft.backward();
  return GridWavefunction::normalized(spec, std::vector<Complex>(fft.data(), fft.data() + n));
}

GridWavefunction translate(const GridWavefunction& g, double shift) {
  auto m = to_momentum(g);
  for (std::size_t i = 0; i < m.chi.size(); ++i) m.chi[i] *= std::polar(1.0, -m.k[i] * shift);
  return from_momentum(g.spec(), m.chi);
}

void check_room(const PointerState& pointer, double lo_shift, double hi_shift) {
  const auto& g = pointer.grid();
  const double lo = g.x0();
  const double hi = g.x0() + g.length();
  const double margin = 6.0 * pointer.width();
  if (pointer.center() + lo_shift - margin < lo || pointer.center() + hi_shift + margin > hi)
    throw DomainError("pointer grid too small for shifts in [" + std::to_string(lo_shift) + ", " +
                      std::to_string(hi_shift) + "]");
}

double integrate_g(const ProtectiveSetup& s) {
  const std::size_t n = 4096;
  const double h = s.tau / static_cast<double>(n);
  double acc = 0.5 * (s.g(0.0) + s.g(s.tau));
  for (std::size_t i = 1; i < n; ++i) acc += s.g(h * static_cast<double>(i));
  return acc * h;
}

}  // namespace

PointerState::PointerState(GridWavefunction grid, double center, double width)
    : grid_(std::move(grid)), center_(center), width_(width) {
  if (!(width_ >= 4.0 * grid_.dx())) throw DomainError("pointer width must be at least 4 dx");
}

PointerState PointerState::gaussian(double center, double width, std::size_t n, double length) {
  GridSpec spec;
  spec.dx = length / static_cast<double>(n);
  spec.x0 = center - 0.5 * length;
  return PointerState(gaussian_packet(spec, n, center, width, 0.0), center, width);
}

void ProtectiveSetup::validate() const {
  if (projections < 1) throw DomainError("need at least one projection");
  if (!(tau > 0) || !std::isfinite(tau)) throw DomainError("tau must be positive");
  if (psi.dim() != observable.dim()) throw DimensionMismatch("state and observable dims differ");
  const double integral = integrate_g(*this);
  if (std::abs(integral - 1.0) > 1e-12) throw DomainError("coupling profile integrates to " + std::to_string(integral));
}

double ProtectiveSetup::g(double t) const {
  if (t < 0 || t > tau) return 0.0;
  if (profile == CouplingProfile::constant) return 1.0 / tau;
  return t <= 0.5 * tau ? 4.0 * t / (tau * tau) : 4.0 * (tau - t) / (tau * tau);
}

double ProtectiveSetup::step_weight(std::size_t n) const {
  const double h = tau / static_cast<double>(projections);
  return h * g(h * static_cast<double>(n));
}

std::vector<PointerBranch> unprotected_measurement(const ProtectiveSetup& setup, const PointerState& pointer) {
  if (setup.psi.dim() != setup.observable.dim()) throw DimensionMismatch("state and observable dims differ");
  const Spectrum sp = setup.observable.spectrum();
  const ComplexVector c = sp.vectors.adjoint() * setup.psi.amplitudes();
  check_room(pointer, std::min(0.0, sp.values.minCoeff()), std::max(0.0, sp.values.maxCoeff()));
  std::vector<PointerBranch> out;
  for (Eigen::Index i = 0; i < sp.values.size(); ++i) {
    const double a = sp.values(i);
    auto it = std::find_if(out.begin(), out.end(), [&](const PointerBranch& b) {
      return std::abs(b.eigenvalue - a) <= 1e-12 * std::max(1.0, std::abs(a));
    });
    if (it != out.end()) {
      it->weight += std::norm(c(i));
      continue;
    }
    out.push_back({c(i), a, std::norm(c(i)), pointer.grid()});
  }
  std::vector<PointerBranch> kept;
  for (auto& b : out) {
    if (b.weight <= 1e-15) continue;
    const double phase = std::abs(b.amplitude) > 0 ? std::arg(b.amplitude) : 0.0;
    b.amplitude = std::polar(std::sqrt(b.weight), phase);
    b.pointer = translate(pointer.grid(), b.eigenvalue);
    kept.push_back(std::move(b));
  }
  return kept;
}

ProtectiveRun zeno_protective_run(const ProtectiveSetup& setup, const PointerState& pointer) {
  setup.validate();
  const Spectrum sp = setup.observable.spectrum();
  const Eigen::Index d = sp.values.size();
  const ComplexVector c = sp.vectors.adjoint() * setup.psi.amplitudes();
  const std::vector<double> a(sp.values.data(), sp.values.data() + d);
  const double expected = expectation_value(setup.psi, setup.observable);
  check_room(pointer, std::min({0.0, sp.values.minCoeff()}), std::max({0.0, sp.values.maxCoeff()}));

  MomentumPointer mp = to_momentum(pointer.grid());
  const std::size_t na = mp.active.size();
  std::vector<double> w(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) w[static_cast<std::size_t>(i)] = std::norm(c(i));

  // Unconditional system state per pointer momentum, in the A eigenbasis.
  std::vector<ComplexMatrix> rho(na, c * c.adjoint());
  const ComplexMatrix proj = c * c.adjoint();
  std::vector<Complex> filter(na, 1.0);

  const std::size_t n_steps = setup.projections;
  const std::size_t every = std::max<std::size_t>(1, n_steps / 10);
  double ensemble_shift = 0, integrated = 0;
  std::vector<ShiftCheckpoint> checkpoints;
  std::vector<Complex> phase(static_cast<std::size_t>(d));
  for (std::size_t n = 1; n <= n_steps; ++n) {
    const double delta = setup.step_weight(n);
    double mean_a = 0;
    for (std::size_t q = 0; q < na; ++q) {
      double tr = 0;
      for (Eigen::Index i = 0; i < d; ++i) tr += a[static_cast<std::size_t>(i)] * rho[q](i, i).real();
      mean_a += mp.weight[q] * tr;
    }
    ensemble_shift += delta * mean_a;
    integrated += delta;
    if (delta != 0) {
      for (std::size_t q = 0; q < na; ++q) {
        const double k = mp.k[mp.active[q]];
        Complex f = 0;
        for (Eigen::Index i = 0; i < d; ++i) {
          phase[static_cast<std::size_t>(i)] = std::polar(1.0, -delta * a[static_cast<std::size_t>(i)] * k);
          f += w[static_cast<std::size_t>(i)] * phase[static_cast<std::size_t>(i)];
        }
        filter[q] *= f;
        ComplexMatrix& r = rho[q];
        for (Eigen::Index i = 0; i < d; ++i)
          for (Eigen::Index j = 0; j < d; ++j)
            r(i, j) *= phase[static_cast<std::size_t>(i)] * std::conj(phase[static_cast<std::size_t>(j)]);
        // Non-selective projective measurement of |psi><psi|.
        const ComplexMatrix pr = proj * r;
        const ComplexMatrix rp = r * proj;
        r = r - pr - rp + 2.0 * (pr * proj);
      }
    }
    if (n % every == 0 || n == n_steps) checkpoints.push_back({n, ensemble_shift, integrated});
  }

  std::vector<Complex> chi(mp.chi.size(), 0.0);
  double kept = 0, total = 0;
  for (std::size_t q = 0; q < na; ++q) {
    chi[mp.active[q]] = mp.chi[mp.active[q]] * filter[q];
    kept += mp.weight[q] * std::norm(filter[q]);
    total += mp.weight[q];
  }
  const double survival = kept / total;
  if (!(survival > 0)) throw NumericError("protective", "post-selected pointer vanished");
  GridWavefunction final_grid = from_momentum(pointer.grid().spec(), chi);
  const double initial_mean = mean_position(pointer.grid());
  const double initial_width = rms_width(pointer.grid());
  const double width = rms_width(final_grid);

  ProtectiveRun run{
      .pointer_shift = mean_position(final_grid) - initial_mean,
      .ensemble_shift = ensemble_shift,
      .expected_shift = expected,
      .survival_probability = survival,
      .final_width = width,
      .width_ratio = width / initial_width,
      .protection_failed = survival < 0.5,
      .diagnostics = {},
      .checkpoints = std::move(checkpoints),
      .final_pointer = PointerState(std::move(final_grid), pointer.center() + expected, pointer.width()),
  };
  if (run.protection_failed) {
    std::ostringstream msg;
    msg << "protection failed: survival " << survival << " < 0.5 with N = " << n_steps
        << "; increase the number of projections";
    run.diagnostics = msg.str();
  }
  return run;
}

FirstOrderCheck first_order_branch_check(const ProtectiveSetup& setup, const PointerState& pointer) {
  setup.validate();
  const Spectrum sp = setup.observable.spectrum();
  const Eigen::Index d = sp.values.size();
  const ComplexVector c = sp.vectors.adjoint() * setup.psi.amplitudes();
  const double mean = expectation_value(setup.psi, setup.observable);
  const double delta = setup.step_weight(1);
  const MomentumPointer mp = to_momentum(pointer.grid());
  double orth2 = 0, k2 = 0;
  for (std::size_t q = 0; q < mp.active.size(); ++q) {
    const double k = mp.k[mp.active[q]];
    ComplexVector u(d);
    for (Eigen::Index i = 0; i < d; ++i) u(i) = c(i) * std::polar(1.0, -delta * sp.values(i) * k);
    const Complex overlap = c.dot(u);
    orth2 += mp.weight[q] * (u - overlap * c).squaredNorm();
    k2 += mp.weight[q] * k * k;
  }
  ComplexVector spread = c;
  for (Eigen::Index i = 0; i < d; ++i) spread(i) *= (sp.values(i) - mean);
  FirstOrderCheck r;
  r.orthogonal_amplitude = std::sqrt(orth2);
  r.predicted = delta * spread.norm() * std::sqrt(k2);
  r.residual = r.predicted > 0 ? std::abs(r.orthogonal_amplitude - r.predicted) / r.predicted : r.orthogonal_amplitude;
  return r;
}

double pointer_shift_rate(const ComplexVectorState& psi_t, const HermitianOperator& a, double g_t) {
  return g_t * expectation_value(psi_t, a);
}

double integrated_pointer_shift(const ProtectiveSetup& setup, std::size_t intervals) {
  if (intervals < 2) throw DomainError("need at least two quadrature intervals");
  if (intervals % 2 == 1) ++intervals;
  const double h = setup.tau / static_cast<double>(intervals);
  double acc = 0;
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double wgt = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += wgt * pointer_shift_rate(setup.psi, setup.observable, setup.g(h * static_cast<double>(i)));
  }
  return acc * h / 3.0;
}

namespace {

void check_region(const GridWavefunction& psi, IndexRange r) {
  if (r.size() == 0 || r.end <= r.begin) throw DomainError("empty measurement region");
  if (r.end > psi.size()) throw DomainError("measurement region outside the grid");
}

}  // namespace

double measure_density(const GridWavefunction& psi, IndexRange region) {
  check_region(psi, region);
  double s = 0;
  for (std::size_t k = region.begin; k < region.end; ++k) s += std::norm(psi[k]);
  return s / static_cast<double>(region.size());
}

double measure_flux(const GridWavefunction& psi, IndexRange region) {
  check_region(psi, region);
  const auto j = flux_density(psi);
  double s = 0;
  for (std::size_t k = region.begin; k < region.end; ++k) s += j[k];
  return s / static_cast<double>(region.size());
}

std::vector<IndexRange> uniform_partition(std::size_t samples, std::size_t regions) {
  if (regions == 0 || regions > samples) throw DomainError("need 1 <= regions <= samples");
  std::vector<IndexRange> out;
  for (std::size_t r = 0; r < regions; ++r) out.push_back({r * samples / regions, (r + 1) * samples / regions});
  return out;
}

TomographyResult tomography(const GridWavefunction& truth, std::span<const IndexRange> partition) {
  if (partition.size() < 16) throw DomainError("tomography needs at least 16 regions");
  std::size_t cursor = 0;
  for (const auto& r : partition) {
    if (r.begin != cursor || r.size() == 0) throw DomainError("partition must tile the grid contiguously");
    cursor = r.end;
  }
  if (cursor != truth.size()) throw DomainError("partition must cover the whole grid");
  const std::size_t n = truth.size();
  std::vector<double> rho(n), j(n), link_flux(n);
  std::vector<std::size_t> owner(n);
  TomographyResult out{truth, 0, {}, {}, 0, 0};
  for (std::size_t r = 0; r < partition.size(); ++r) {
    const double dr = measure_density(truth, partition[r]);
    const double fr = measure_flux(truth, partition[r]);
    out.region_density.push_back(dr);
    out.region_flux.push_back(fr);
    for (std::size_t k = partition[r].begin; k < partition[r].end; ++k) {
      rho[k] = dr;
      owner[k] = r;
    }
  }
  // Region fluxes live on links; a link between two regions takes their mean.
  for (std::size_t k = 0; k < n; ++k)
    link_flux[k] = 0.5 * (out.region_flux[owner[k]] + out.region_flux[owner[(k + 1) % n]]);
  for (std::size_t k = 0; k < n; ++k) j[k] = 0.5 * (link_flux[(k + n - 1) % n] + link_flux[k]);
  double total = 0;
  for (double v : rho) total += v;
  total *= truth.dx();
  for (auto& v : rho) v /= total;
  out.reconstructed = reconstruct_wavefunction(DensityPair{truth.spec(), rho, j}, truth.mass(), truth.hbar());
  out.l2_error = l2_distance_up_to_phase(truth, out.reconstructed);
  for (std::size_t r = 0; r < partition.size(); ++r) {
    out.density_fidelity =
        std::max(out.density_fidelity, std::abs(measure_density(out.reconstructed, partition[r]) - out.region_density[r]));
    out.flux_fidelity =
        std::max(out.flux_fidelity, std::abs(measure_flux(out.reconstructed, partition[r]) - out.region_flux[r]));
  }
  return out;
}

}  // namespace qrdm
