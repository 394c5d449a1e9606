#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qrdm/hilbert.hpp"
#include "qrdm/random.hpp"

namespace qrdm {

namespace constants {
inline constexpr double hbar_ev_s = 6.582119569e-16;
inline constexpr double planck_time_s = 5.391247e-44;
inline constexpr double c_m_per_s = 2.99792458e8;
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double h_ev_s = 2.0 * pi * hbar_ev_s;
inline constexpr double electron_mass_ev = 0.51099895000e6;
}  // namespace constants

enum class KMode { dynamic, frozen };
enum class DeltaEReducer { rms, linear_sum };

struct CollapseConfig {
  KMode k_mode = KMode::dynamic;
  double frozen_k = 0.0;
  DeltaEReducer reducer = DeltaEReducer::rms;
  double planck_time = 1.0;
  double hbar = 1.0;
  double collapse_epsilon = 1e-6;
  std::uint64_t seed = 0;

  static CollapseConfig natural();
  static CollapseConfig physical();
  static CollapseConfig frozen(double k);
  void validate() const;
};

struct CollapseStep {
  EnergySuperposition state;
  std::size_t staying_index = 0;
  double k = 0;
};

// Equal energies (relative gap <= 1e-12) become one branch with amplitude
// sqrt(sum P) and the phase of the coherent sum.
EnergySuperposition merge_degenerate(const EnergySuperposition& s);

double collapse_rate(const EnergySuperposition& s, const CollapseConfig& cfg);

CollapseStep collapse_step(const EnergySuperposition& s, const CollapseConfig& cfg, Rng& rng);
// Deterministic update for a given staying branch; the state must already be merged.
EnergySuperposition collapse_update(const EnergySuperposition& s, std::size_t staying, double k,
                                    const CollapseConfig& cfg);

struct CollapseTrajectory {
  std::vector<std::vector<double>> probabilities;  // one row per recorded step, row 0 is the merged input
  std::vector<std::size_t> staying;
  std::vector<double> energies;
  std::optional<std::size_t> outcome;
  std::size_t steps = 0;
};

CollapseTrajectory run_trajectory(const EnergySuperposition& s0, const CollapseConfig& cfg, std::size_t max_steps,
                                  Rng& rng, bool record = true);
CollapseTrajectory run_trajectory(const EnergySuperposition& s0, const CollapseConfig& cfg,
                                  std::size_t max_steps);

struct EnsembleSlice {
  std::size_t step = 0;
  std::vector<double> mean_p;
  std::vector<double> se_p;
  Eigen::MatrixXd mean_pp;  // upper triangle i < j
  Eigen::MatrixXd se_pp;
};

// Fixed-length runs of n_steps (no collapse threshold); slices every slice_stride steps from step 0.
// Trial i uses Rng(derive_seed(cfg.seed, i)).
std::vector<EnsembleSlice> ensemble_statistics(const EnergySuperposition& s0, const CollapseConfig& cfg,
                                               std::size_t n_trials, std::size_t n_steps, std::size_t slice_stride,
                                               unsigned threads = 1);

struct OutcomeStatistics {
  std::vector<std::size_t> outcome_counts;
  std::size_t undecided = 0;
  std::vector<double> steps_to_collapse;  // decided trials only
};
OutcomeStatistics outcome_statistics(const EnergySuperposition& s0, const CollapseConfig& cfg,
                                     std::size_t n_trials, std::size_t max_steps, unsigned threads = 1);

double collapse_time(double delta_e, const CollapseConfig& cfg);

struct RelativisticCollapseTime {
  double tau = 0;
  double factor = 1;
  std::string regime = "high-energy (E ~ pc)";
};
RelativisticCollapseTime relativistic_collapse_time(double delta_e, double v, const CollapseConfig& cfg,
                                                    double c = constants::c_m_per_s);

struct ManyBodyBranchTable {
  Eigen::MatrixXd energies;  // n_subsystems x m_branches
  std::vector<Complex> amplitudes;

  void validate() const;
  std::vector<double> probabilities() const;
};
double manybody_delta_e(const ManyBodyBranchTable& t, DeltaEReducer reducer);

struct ScaleInvarianceReport {
  std::vector<double> group_before;
  std::vector<double> group_after;
  std::vector<double> two_level_after;
  double max_deviation = 0;
  double group_sum = 0;
  bool passed = false;
};
ScaleInvarianceReport scale_invariance_check(const EnergySuperposition& s, const CollapseConfig& cfg,
                                             const std::vector<std::vector<std::size_t>>& grouping,
                                             std::size_t staying);

struct Massless {};
struct Massive {
  double mass_ev = constants::electron_mass_ev;
};
// Levels in eV for n = 1..n_max; R_U in metres.
std::vector<double> horizon_energy_levels(double radius_m, Massless, std::size_t n_max);
std::vector<double> horizon_energy_levels(double radius_m, Massive particle, std::size_t n_max);

struct CalculatorRow {
  std::string name;
  double delta_e_ev = 0;
  double tau_c_s = 0;
  double reference_s = 0;
  double ratio = 0;          // tau / target
  int decade_gap = 0;        // |round(log10 tau) - round(log10 target)|
};
struct CalculatorScenario {
  std::string name;
  double delta_e_ev = 0;
  double target_s = 0;
};
std::vector<CalculatorScenario> reference_scenarios();
std::vector<CalculatorRow> collapse_time_table(const std::vector<CalculatorScenario>& scenarios,
                                               const CollapseConfig& cfg);

}  // namespace qrdm
