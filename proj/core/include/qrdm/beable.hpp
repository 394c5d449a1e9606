#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qrdm/hilbert.hpp"
#include "qrdm/random.hpp"
#include "qrdm/rdm.hpp"

namespace qrdm {

using RealMatrix = Eigen::MatrixXd;

inline constexpr double kOccupationFloor = 1e-12;
inline constexpr double kMaxStepOutflow = 0.1;

// rates(m, n) * dt is the probability of a jump n -> m. Diagonal entries are unused.
struct TransitionRateMatrix {
  RealMatrix rates;
  int dim() const noexcept { return static_cast<int>(rates.rows()); }
  double outflow(int n) const;
  double max_outflow() const;
};

// J(n, m) = 2 Im(psi_n^* H_nm psi_m); hbar dP_n/dt = sum_m J(n, m).
RealMatrix probability_current(const HermitianOperator& h, const ComplexVectorState& psi);

TransitionRateMatrix bell_transition_rates(const RealMatrix& current, std::span<const double> p,
                                           double hbar = 1.0);
TransitionRateMatrix add_homogeneous_noise(const TransitionRateMatrix& t, std::span<const double> p,
                                           double c);
std::vector<double> master_equation_step(std::span<const double> p, const TransitionRateMatrix& t, double dt);

// max |J(n,m)/hbar - (T_nm P_m - T_mn P_n)|
double detailed_relation_residual(const RealMatrix& current, const TransitionRateMatrix& t,
                                  std::span<const double> p, double hbar = 1.0);

struct JumpOptions {
  double hbar = 1.0;
  double noise = 0.0;  // homogeneous rate c
};

// Per-step jump probabilities along the exact unitary evolution psi(t).
// Rates in step k use the Simpson average of J over [t_k, t_k + dt] and P(t_k).
class JumpSchedule {
 public:
  JumpSchedule(const HermitianOperator& h, const ComplexVectorState& psi0, double dt, std::size_t steps,
               JumpOptions options = {});

  int dim() const noexcept { return dim_; }
  std::size_t steps() const noexcept { return steps_; }
  double dt() const noexcept { return dt_; }
  // Jump probabilities for step k, column n holds p(n -> m); diagonal is the stay probability.
  RealMatrix step_matrix(std::size_t k) const;
  std::vector<double> populations(std::size_t k) const;  // |<n|psi(t_k)>|^2, k in [0, steps]
  ComplexVectorState state_at(double t) const;

  // Next site after one step from `site`.
  std::uint32_t advance(std::size_t k, std::uint32_t site, Rng& rng) const;
  StayTrajectory sample(std::uint32_t beable0, std::uint64_t seed) const;

 private:
  int dim_;
  std::size_t steps_;
  double dt_;
  JumpOptions options_;
  Spectrum spectrum_;
  ComplexVector coefficients_;
  std::vector<double> cumulative_;  // steps * dim * dim
  std::vector<double> populations_;
};

StayTrajectory jump_trajectory(const HermitianOperator& h, const ComplexVectorState& psi0, std::uint32_t beable0,
                               double dt, std::size_t steps, std::uint64_t seed, JumpOptions options = {});

struct EquivarianceSlice {
  std::size_t step = 0;
  double t = 0;
  std::vector<double> expected;
  std::vector<std::size_t> counts;
  double chi2 = 0;
  std::size_t dof = 0;
  double p_value = 1;
};

struct EquivarianceReport {
  std::vector<EquivarianceSlice> slices;
  double max_detailed_residual = 0;
  double min_p_value() const;
};

struct EnsembleOptions {
  std::size_t trajectories = 10000;
  std::size_t slices = 10;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  JumpOptions jump{};
};

// Initial beables drawn from |psi0|^2; slices evenly spaced over the run, last one at the final step.
EquivarianceReport run_equivariance(const HermitianOperator& h, const ComplexVectorState& psi0, double dt,
                                    std::size_t steps, const EnsembleOptions& options);

// Final site of each trajectory, one per trajectory.
std::vector<std::uint32_t> ensemble_final_sites(const JumpSchedule& schedule, std::size_t trajectories,
                                                std::uint64_t seed, unsigned threads = 1);

// Time of the first jump (or the run length if none) for trajectories started from |psi0|^2.
std::vector<double> first_jump_times(const JumpSchedule& schedule, std::size_t trajectories, std::uint64_t seed,
                                     unsigned threads = 1);

}  // namespace qrdm
