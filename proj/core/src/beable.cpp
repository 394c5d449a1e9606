#include "qrdm/beable.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "parallel.hpp"
#include "qrdm/errors.hpp"
#include "qrdm/stats.hpp"

namespace qrdm {

namespace {

void check_probabilities(std::span<const double> p, int dim) {
  if (static_cast<int>(p.size()) != dim) throw DimensionMismatch("probability vector and rate matrix dims differ");
  for (double v : p)
    if (!(v >= 0) || !std::isfinite(v)) throw DomainError("probabilities must be finite and non-negative");
}

RealMatrix current_of(const ComplexMatrix& h, const ComplexVector& psi) {
  const Eigen::Index d = psi.size();
  RealMatrix j(d, d);
  for (Eigen::Index n = 0; n < d; ++n)
    for (Eigen::Index m = 0; m < d; ++m) j(n, m) = 2.0 * (std::conj(psi(n)) * h(n, m) * psi(m)).imag();
  return j;
}

}  // namespace

double TransitionRateMatrix::outflow(int n) const {
  double s = 0;
  for (int m = 0; m < dim(); ++m)
    if (m != n) s += rates(m, n);
  return s;
}

double TransitionRateMatrix::max_outflow() const {
  double worst = 0;
  for (int n = 0; n < dim(); ++n) worst = std::max(worst, outflow(n));
  return worst;
}

RealMatrix probability_current(const HermitianOperator& h, const ComplexVectorState& psi) {
  if (h.dim() != psi.dim()) throw DimensionMismatch("Hamiltonian and state dims differ");
  return current_of(h.matrix(), psi.amplitudes());
}

TransitionRateMatrix bell_transition_rates(const RealMatrix& current, std::span<const double> p, double hbar) {
  if (current.rows() != current.cols()) throw DimensionMismatch("current matrix must be square");
  const int d = static_cast<int>(current.rows());
  check_probabilities(p, d);
  if (!(hbar > 0)) throw DomainError("hbar must be positive");
  TransitionRateMatrix t{RealMatrix::Zero(d, d)};
  for (int n = 0; n < d; ++n) {
    for (int m = 0; m < d; ++m) {
      if (n == m) continue;
      const double j = current(n, m);
      if (j != 0 && p[static_cast<std::size_t>(m)] < kOccupationFloor)
        throw DegenerateOccupation("site " + std::to_string(m) + " carries current with P = " +
                                   std::to_string(p[static_cast<std::size_t>(m)]));
      if (j > 0) t.rates(n, m) = j / (hbar * p[static_cast<std::size_t>(m)]);
    }
  }
  return t;
}

TransitionRateMatrix add_homogeneous_noise(const TransitionRateMatrix& t, std::span<const double> p, double c) {
  check_probabilities(p, t.dim());
  if (!(c >= 0) || !std::isfinite(c)) throw DomainError("noise rate must be finite and non-negative");
  for (double v : p)
    if (v < kOccupationFloor) throw DegenerateOccupation("homogeneous noise needs every P_m above the floor");
  TransitionRateMatrix out = t;
  if (c == 0) return out;
  for (int n = 0; n < t.dim(); ++n)
    for (int m = 0; m < t.dim(); ++m)
      if (n != m) out.rates(n, m) += c / p[static_cast<std::size_t>(m)];
  return out;
}

std::vector<double> master_equation_step(std::span<const double> p, const TransitionRateMatrix& t, double dt) {
  check_probabilities(p, t.dim());
  if (!(dt >= 0)) throw StepSizeError("dt must be non-negative");
  const double worst = t.max_outflow() * dt;
  if (worst >= kMaxStepOutflow)
    throw StepSizeError("dt * max outflow = " + std::to_string(worst) + " >= " + std::to_string(kMaxStepOutflow));
  const int d = t.dim();
  std::vector<double> out(p.begin(), p.end());
  for (int n = 0; n < d; ++n) {
    for (int m = 0; m < d; ++m) {
      if (n == m) continue;
      const double flow = t.rates(m, n) * p[static_cast<std::size_t>(n)] * dt;
      out[static_cast<std::size_t>(n)] -= flow;
      out[static_cast<std::size_t>(m)] += flow;
    }
  }
  return out;
}

double detailed_relation_residual(const RealMatrix& current, const TransitionRateMatrix& t, std::span<const double> p,
                                  double hbar) {
  check_probabilities(p, t.dim());
  double worst = 0;
  for (int n = 0; n < t.dim(); ++n)
    for (int m = 0; m < t.dim(); ++m) {
      if (n == m) continue;
      const double lhs = current(n, m) / hbar;
      const double rhs =
          t.rates(n, m) * p[static_cast<std::size_t>(m)] - t.rates(m, n) * p[static_cast<std::size_t>(n)];
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  return worst;
}

JumpSchedule::JumpSchedule(const HermitianOperator& h, const ComplexVectorState& psi0, double dt, std::size_t steps,
                           JumpOptions options)
    : dim_(h.dim()), steps_(steps), dt_(dt), options_(options), spectrum_(h.spectrum()) {
  if (h.dim() != psi0.dim()) throw DimensionMismatch("Hamiltonian and state dims differ");
  if (!(dt > 0)) throw StepSizeError("dt must be positive");
  if (!(options_.hbar > 0)) throw DomainError("hbar must be positive");
  coefficients_ = spectrum_.vectors.adjoint() * psi0.amplitudes();
  const std::size_t d = static_cast<std::size_t>(dim_);
  cumulative_.assign(steps * d * d, 0.0);
  populations_.assign((steps + 1) * d, 0.0);
  auto amplitudes = [&](double t) -> ComplexVector {
    ComplexVector c = coefficients_;
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::polar(1.0, -spectrum_.values(i) * t / options_.hbar);
    return spectrum_.vectors * c;
  };
  ComplexVector start = amplitudes(0.0);
  RealMatrix j_start = current_of(h.matrix(), start);
  for (std::size_t i = 0; i < d; ++i) populations_[i] = std::norm(start(static_cast<Eigen::Index>(i)));
  std::vector<double> p(d);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t0 = static_cast<double>(k) * dt;
    const ComplexVector mid = amplitudes(t0 + 0.5 * dt);
    const ComplexVector end = amplitudes(t0 + dt);
    const RealMatrix j_end = current_of(h.matrix(), end);
    const RealMatrix j_avg = (j_start + 4.0 * current_of(h.matrix(), mid) + j_end) / 6.0;
    for (std::size_t i = 0; i < d; ++i) p[i] = populations_[k * d + i];
    TransitionRateMatrix rates = bell_transition_rates(j_avg, p, options_.hbar);
    if (options_.noise > 0) rates = add_homogeneous_noise(rates, p, options_.noise);
    const double worst = rates.max_outflow() * dt;
    if (worst >= kMaxStepOutflow)
      throw StepSizeError("jump probability " + std::to_string(worst) + " exceeds " +
                          std::to_string(kMaxStepOutflow) + " at step " + std::to_string(k));
    double* cum = cumulative_.data() + k * d * d;
    for (std::size_t n = 0; n < d; ++n) {
      double acc = 0;
      for (std::size_t m = 0; m < d; ++m) {
        const double q = (m == n) ? 1.0 - rates.outflow(static_cast<int>(n)) * dt
                                  : rates.rates(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) * dt;
        acc += q;
        cum[n * d + m] = acc;
      }
      cum[n * d + d - 1] = 1.0;
    }
    for (std::size_t i = 0; i < d; ++i) populations_[(k + 1) * d + i] = std::norm(end(static_cast<Eigen::Index>(i)));
    j_start = j_end;
  }
}

RealMatrix JumpSchedule::step_matrix(std::size_t k) const {
  if (k >= steps_) throw DomainError("step index out of range");
  const std::size_t d = static_cast<std::size_t>(dim_);
  const double* cum = cumulative_.data() + k * d * d;
  RealMatrix q(dim_, dim_);
  for (std::size_t n = 0; n < d; ++n)
    for (std::size_t m = 0; m < d; ++m)
      q(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = cum[n * d + m] - (m > 0 ? cum[n * d + m - 1] : 0.0);
  return q;
}

std::vector<double> JumpSchedule::populations(std::size_t k) const {
  if (k > steps_) throw DomainError("step index out of range");
  const std::size_t d = static_cast<std::size_t>(dim_);
  return {populations_.begin() + static_cast<std::ptrdiff_t>(k * d),
          populations_.begin() + static_cast<std::ptrdiff_t>((k + 1) * d)};
}

ComplexVectorState JumpSchedule::state_at(double t) const {
  ComplexVector c = coefficients_;
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::polar(1.0, -spectrum_.values(i) * t / options_.hbar);
  return ComplexVectorState::normalized(spectrum_.vectors * c);
}

std::uint32_t JumpSchedule::advance(std::size_t k, std::uint32_t site, Rng& rng) const {
  const std::size_t d = static_cast<std::size_t>(dim_);
  const double* cum = cumulative_.data() + k * d * d + static_cast<std::size_t>(site) * d;
  const double u = rng.uniform();
  for (std::size_t m = 0; m < d; ++m)
    if (u < cum[m]) return static_cast<std::uint32_t>(m);
  return static_cast<std::uint32_t>(d - 1);
}

StayTrajectory JumpSchedule::sample(std::uint32_t beable0, std::uint64_t seed) const {
  if (beable0 >= static_cast<std::uint32_t>(dim_)) throw DimensionMismatch("initial beable outside the site range");
  Rng rng(seed);
  StayTrajectory t;
  t.dt_instant = dt_;
  t.seed = seed;
  t.stays.reserve(steps_ + 1);
  std::uint32_t site = beable0;
  t.stays.push_back(site);
  for (std::size_t k = 0; k < steps_; ++k) {
    site = advance(k, site, rng);
    t.stays.push_back(site);
  }
  return t;
}

StayTrajectory jump_trajectory(const HermitianOperator& h, const ComplexVectorState& psi0, std::uint32_t beable0,
                               double dt, std::size_t steps, std::uint64_t seed, JumpOptions options) {
  return JumpSchedule(h, psi0, dt, steps, options).sample(beable0, seed);
}

double EquivarianceReport::min_p_value() const {
  double p = 1;
  for (const auto& s : slices) p = std::min(p, s.p_value);
  return p;
}

namespace {

std::uint32_t initial_site(const std::vector<double>& p0, Rng& rng) {
  std::vector<double> cdf(p0.size());
  double acc = 0;
  for (std::size_t i = 0; i < p0.size(); ++i) cdf[i] = (acc += p0[i]);
  return static_cast<std::uint32_t>(rng.pick(cdf));
}

}  // namespace

EquivarianceReport run_equivariance(const HermitianOperator& h, const ComplexVectorState& psi0, double dt,
                                    std::size_t steps, const EnsembleOptions& options) {
  if (options.trajectories == 0 || options.slices == 0 || steps == 0)
    throw DomainError("equivariance run needs trajectories, slices and steps");
  const JumpSchedule schedule(h, psi0, dt, steps, options.jump);
  std::vector<std::size_t> slice_steps;
  for (std::size_t s = 1; s <= options.slices; ++s)
    slice_steps.push_back(std::max<std::size_t>(1, (s * steps) / options.slices));
  const std::size_t ns = slice_steps.size();
  const auto p0 = schedule.populations(0);
  std::vector<std::uint32_t> record(options.trajectories * ns);
  detail::parallel_for(options.trajectories, options.threads, [&](std::size_t i) {
    Rng rng(derive_seed(options.seed, i));
    std::uint32_t site = initial_site(p0, rng);
    std::size_t next = 0;
    for (std::size_t k = 0; k < steps && next < ns; ++k) {
      site = schedule.advance(k, site, rng);
      while (next < ns && slice_steps[next] == k + 1) record[i * ns + next++] = site;
    }
  });
  EquivarianceReport report;
  const std::size_t d = static_cast<std::size_t>(schedule.dim());
  for (std::size_t s = 0; s < ns; ++s) {
    EquivarianceSlice slice;
    slice.step = slice_steps[s];
    slice.t = static_cast<double>(slice.step) * dt;
    slice.expected = schedule.populations(slice.step);
    slice.counts.assign(d, 0);
    for (std::size_t i = 0; i < options.trajectories; ++i) ++slice.counts[record[i * ns + s]];
    const auto chi = stats::chi_square_gof(slice.counts, slice.expected);
    slice.chi2 = chi.statistic;
    slice.dof = chi.dof;
    slice.p_value = chi.p_value;

    const auto psi_t = schedule.state_at(slice.t);
    const RealMatrix j = probability_current(h, psi_t);
    auto rates = bell_transition_rates(j, slice.expected, options.jump.hbar);
    if (options.jump.noise > 0) rates = add_homogeneous_noise(rates, slice.expected, options.jump.noise);
    report.max_detailed_residual =
        std::max(report.max_detailed_residual, detailed_relation_residual(j, rates, slice.expected, options.jump.hbar));
    report.slices.push_back(std::move(slice));
  }
  return report;
}

std::vector<std::uint32_t> ensemble_final_sites(const JumpSchedule& schedule, std::size_t trajectories,
                                                std::uint64_t seed, unsigned threads) {
  const auto p0 = schedule.populations(0);
  std::vector<std::uint32_t> out(trajectories);
  detail::parallel_for(trajectories, threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    std::uint32_t site = initial_site(p0, rng);
    for (std::size_t k = 0; k < schedule.steps(); ++k) site = schedule.advance(k, site, rng);
    out[i] = site;
  });
  return out;
}

std::vector<double> first_jump_times(const JumpSchedule& schedule, std::size_t trajectories, std::uint64_t seed,
                                     unsigned threads) {
  const auto p0 = schedule.populations(0);
  std::vector<double> out(trajectories);
  detail::parallel_for(trajectories, threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    const std::uint32_t start = initial_site(p0, rng);
    double t = static_cast<double>(schedule.steps()) * schedule.dt();
    for (std::size_t k = 0; k < schedule.steps(); ++k) {
      if (schedule.advance(k, start, rng) != start) {
        t = static_cast<double>(k + 1) * schedule.dt();
        break;
      }
    }
    out[i] = t;
  });
  return out;
}

}  // namespace qrdm
