#include "qrdm/collapse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "parallel.hpp"
#include "qrdm/errors.hpp"

namespace qrdm {

CollapseConfig CollapseConfig::natural() { return CollapseConfig{}; }

CollapseConfig CollapseConfig::physical() {
  CollapseConfig c;
  c.planck_time = constants::planck_time_s;
  c.hbar = constants::hbar_ev_s;
  return c;
}

CollapseConfig CollapseConfig::frozen(double k) {
  CollapseConfig c;
  c.k_mode = KMode::frozen;
  c.frozen_k = k;
  return c;
}

void CollapseConfig::validate() const {
  if (!(planck_time > 0) || !std::isfinite(planck_time)) throw DomainError("t_P must be positive");
  if (!(hbar > 0) || !std::isfinite(hbar)) throw DomainError("hbar must be positive");
  if (!(frozen_k >= 0 && frozen_k <= 1)) throw DomainError("frozen k must lie in [0, 1]");
  if (!(collapse_epsilon > 0 && collapse_epsilon < 1)) throw DomainError("collapse epsilon must lie in (0, 1)");
}

namespace {

bool same_energy(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

double rms_spread(std::span<const double> e, std::span<const double> p) {
  double mean = 0;
  for (std::size_t i = 0; i < e.size(); ++i) mean += p[i] * e[i];
  double var = 0;
  for (std::size_t i = 0; i < e.size(); ++i) var += p[i] * (e[i] - mean) * (e[i] - mean);
  return std::sqrt(std::max(0.0, var));
}

void apply_update(std::vector<double>& p, std::size_t staying, double k) {
  double total = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = (i == staying) ? p[i] + k * (1.0 - p[i]) : (1.0 - k) * p[i];
    total += p[i];
  }
  for (auto& v : p) v /= total;
}

std::size_t draw(const std::vector<double>& p, Rng& rng) {
  std::vector<double> cdf(p.size());
  std::partial_sum(p.begin(), p.end(), cdf.begin());
  return rng.pick(cdf);
}

template <class Rate>
CollapseTrajectory run_kernel(std::vector<double> p, std::vector<double> energies, const CollapseConfig& cfg,
                              std::size_t max_steps, Rng& rng, bool record, Rate&& rate) {
  CollapseTrajectory out;
  out.energies = std::move(energies);
  auto decided = [&]() -> std::optional<std::size_t> {
    const auto it = std::max_element(p.begin(), p.end());
    if (*it > 1.0 - cfg.collapse_epsilon) return static_cast<std::size_t>(it - p.begin());
    return std::nullopt;
  };
  if (record) out.probabilities.push_back(p);
  out.outcome = decided();
  std::vector<double> cdf(p.size());
  while (!out.outcome && out.steps < max_steps) {
    const double k = rate(p);
    if (k > 1.0) throw SuperPlanckianError("k = " + std::to_string(k) + " exceeds 1 at step " + std::to_string(out.steps));
    std::partial_sum(p.begin(), p.end(), cdf.begin());
    const std::size_t s = rng.pick(cdf);
    apply_update(p, s, k);
    ++out.steps;
    if (record) {
      out.probabilities.push_back(p);
      out.staying.push_back(s);
    }
    out.outcome = decided();
  }
  return out;
}

}  // namespace

EnergySuperposition merge_degenerate(const EnergySuperposition& s) {
  std::vector<EnergyBranch> merged;
  std::vector<double> weight;
  std::vector<Complex> first;
  for (const auto& b : s.branches()) {
    auto it = std::find_if(merged.begin(), merged.end(), [&](const EnergyBranch& m) { return same_energy(m.energy, b.energy); });
    if (it == merged.end()) {
      merged.push_back(b);
      weight.push_back(std::norm(b.amplitude));
      first.push_back(b.amplitude);
    } else {
      const auto i = static_cast<std::size_t>(it - merged.begin());
      it->amplitude += b.amplitude;
      weight[i] += std::norm(b.amplitude);
    }
  }
  if (merged.size() == s.size()) return s;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    const Complex sum = merged[i].amplitude;
    const double phase = std::abs(sum) > 1e-300 ? std::arg(sum) : std::arg(first[i]);
    merged[i].amplitude = std::polar(std::sqrt(weight[i]), phase);
  }
  return EnergySuperposition(std::move(merged), s.unit_mode());
}

double collapse_rate(const EnergySuperposition& s, const CollapseConfig& cfg) {
  if (cfg.k_mode == KMode::frozen) return cfg.frozen_k;
  return energy_uncertainty(s) * cfg.planck_time / cfg.hbar;
}

EnergySuperposition collapse_update(const EnergySuperposition& s, std::size_t staying, double k,
                                    const CollapseConfig& cfg) {
  if (staying >= s.size()) throw DimensionMismatch("staying index out of range");
  if (k < 0) throw DomainError("k must be non-negative");
  if (k > 1) throw SuperPlanckianError("k = " + std::to_string(k) + " exceeds 1");
  auto p = s.probabilities();
  apply_update(p, staying, k);
  std::vector<EnergyBranch> out = s.branches();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double phase = std::arg(out[i].amplitude) - out[i].energy * cfg.planck_time / cfg.hbar;
    out[i].amplitude = std::polar(std::sqrt(p[i]), phase);
  }
  return EnergySuperposition(std::move(out), s.unit_mode());
}

CollapseStep collapse_step(const EnergySuperposition& s, const CollapseConfig& cfg, Rng& rng) {
  cfg.validate();
  EnergySuperposition merged = merge_degenerate(s);
  const double k = collapse_rate(merged, cfg);
  if (k > 1) throw SuperPlanckianError("k = dE t_P / hbar = " + std::to_string(k) + " exceeds 1");
  const std::size_t staying = draw(merged.probabilities(), rng);
  return {collapse_update(merged, staying, k, cfg), staying, k};
}

CollapseTrajectory run_trajectory(const EnergySuperposition& s0, const CollapseConfig& cfg, std::size_t max_steps,
                                  Rng& rng, bool record) {
  cfg.validate();
  const EnergySuperposition merged = merge_degenerate(s0);
  std::vector<double> energies;
  for (const auto& b : merged.branches()) energies.push_back(b.energy);
  const double scale = cfg.planck_time / cfg.hbar;
  if (cfg.k_mode == KMode::frozen) {
    const double k = cfg.frozen_k;
    return run_kernel(merged.probabilities(), energies, cfg, max_steps, rng, record, [k](const auto&) { return k; });
  }
  return run_kernel(merged.probabilities(), energies, cfg, max_steps, rng, record,
                    [&](const std::vector<double>& p) { return rms_spread(energies, p) * scale; });
}

CollapseTrajectory run_trajectory(const EnergySuperposition& s0, const CollapseConfig& cfg, std::size_t max_steps) {
  Rng rng(cfg.seed);
  return run_trajectory(s0, cfg, max_steps, rng, true);
}

std::vector<EnsembleSlice> ensemble_statistics(const EnergySuperposition& s0, const CollapseConfig& cfg,
                                               std::size_t n_trials, std::size_t n_steps, std::size_t slice_stride,
                                               unsigned threads) {
  cfg.validate();
  if (n_trials == 0) throw DomainError("need at least one trial");
  if (slice_stride == 0) throw DomainError("slice stride must be positive");
  const EnergySuperposition merged = merge_degenerate(s0);
  std::vector<double> energies;
  for (const auto& b : merged.branches()) energies.push_back(b.energy);
  const std::size_t m = merged.size();
  std::vector<std::size_t> slice_steps;
  for (std::size_t s = 0; s <= n_steps; s += slice_stride) slice_steps.push_back(s);
  const std::size_t ns = slice_steps.size();
  std::vector<double> record(n_trials * ns * m);
  const double scale = cfg.planck_time / cfg.hbar;
  detail::parallel_for(n_trials, threads, [&](std::size_t trial) {
    Rng rng(derive_seed(cfg.seed, trial));
    std::vector<double> p = merged.probabilities();
    std::vector<double> cdf(m);
    std::size_t next = 0;
    for (std::size_t step = 0; step <= n_steps; ++step) {
      if (next < ns && slice_steps[next] == step) {
        std::copy(p.begin(), p.end(), record.begin() + static_cast<std::ptrdiff_t>((trial * ns + next) * m));
        ++next;
      }
      if (step == n_steps) break;
      const double k = cfg.k_mode == KMode::frozen ? cfg.frozen_k : rms_spread(energies, p) * scale;
      if (k > 1.0) throw SuperPlanckianError("k exceeds 1 at step " + std::to_string(step));
      std::partial_sum(p.begin(), p.end(), cdf.begin());
      apply_update(p, rng.pick(cdf), k);
    }
  });
  std::vector<EnsembleSlice> out;
  const double nt = static_cast<double>(n_trials);
  for (std::size_t s = 0; s < ns; ++s) {
    EnsembleSlice slice;
    slice.step = slice_steps[s];
    slice.mean_p.assign(m, 0.0);
    slice.se_p.assign(m, 0.0);
    slice.mean_pp = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    slice.se_pp = slice.mean_pp;
    Eigen::MatrixXd sq = slice.mean_pp;
    std::vector<double> sq_p(m, 0.0);
    for (std::size_t t = 0; t < n_trials; ++t) {
      const double* p = record.data() + (t * ns + s) * m;
      for (std::size_t i = 0; i < m; ++i) {
        slice.mean_p[i] += p[i];
        sq_p[i] += p[i] * p[i];
        for (std::size_t j = i + 1; j < m; ++j) {
          const double v = p[i] * p[j];
          slice.mean_pp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += v;
          sq(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += v * v;
        }
      }
    }
    auto se = [&](double sum, double sumsq) {
      if (n_trials < 2) return 0.0;
      const double mean = sum / nt;
      const double var = std::max(0.0, (sumsq - nt * mean * mean) / (nt - 1.0));
      return std::sqrt(var / nt);
    };
    for (std::size_t i = 0; i < m; ++i) {
      slice.se_p[i] = se(slice.mean_p[i], sq_p[i]);
      slice.mean_p[i] /= nt;
      for (std::size_t j = i + 1; j < m; ++j) {
        const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
        slice.se_pp(a, b) = se(slice.mean_pp(a, b), sq(a, b));
        slice.mean_pp(a, b) /= nt;
      }
    }
    out.push_back(std::move(slice));
  }
  return out;
}

OutcomeStatistics outcome_statistics(const EnergySuperposition& s0, const CollapseConfig& cfg, std::size_t n_trials,
                                     std::size_t max_steps, unsigned threads) {
  cfg.validate();
  const EnergySuperposition merged = merge_degenerate(s0);
  std::vector<long> outcome(n_trials, -1);
  std::vector<double> steps(n_trials, 0.0);
  detail::parallel_for(n_trials, threads, [&](std::size_t trial) {
    Rng rng(derive_seed(cfg.seed, trial));
    const auto t = run_trajectory(merged, cfg, max_steps, rng, false);
    if (t.outcome) outcome[trial] = static_cast<long>(*t.outcome);
    steps[trial] = static_cast<double>(t.steps);
  });
  OutcomeStatistics out;
  out.outcome_counts.assign(merged.size(), 0);
  for (std::size_t t = 0; t < n_trials; ++t) {
    if (outcome[t] < 0) {
      ++out.undecided;
      continue;
    }
    ++out.outcome_counts[static_cast<std::size_t>(outcome[t])];
    out.steps_to_collapse.push_back(steps[t]);
  }
  return out;
}

double collapse_time(double delta_e, const CollapseConfig& cfg) {
  cfg.validate();
  if (!(delta_e > 0) || !std::isfinite(delta_e)) throw DomainError("energy uncertainty must be positive");
  const double r = cfg.hbar / delta_e;
  return r * r / cfg.planck_time;
}

RelativisticCollapseTime relativistic_collapse_time(double delta_e, double v, const CollapseConfig& cfg, double c) {
  if (!(c > 0)) throw DomainError("c must be positive");
  if (!(std::abs(v) < c)) throw DomainError("|v| must be below c");
  RelativisticCollapseTime r;
  const double b = 1.0 + v / c;
  r.factor = 1.0 / (b * b);
  r.tau = r.factor * collapse_time(delta_e, cfg);
  return r;
}

void ManyBodyBranchTable::validate() const {
  if (energies.rows() < 1 || energies.cols() < 1) throw DimensionMismatch("branch table is empty");
  if (static_cast<std::size_t>(energies.cols()) != amplitudes.size())
    throw DimensionMismatch("amplitude count must match branch count");
  if (!energies.allFinite()) throw DomainError("branch energies must be finite");
  double n = 0;
  for (const auto& a : amplitudes) n += std::norm(a);
  if (std::abs(n - 1.0) > kNormTolerance) throw NormalizationError("branch amplitudes sum to " + std::to_string(n));
}

std::vector<double> ManyBodyBranchTable::probabilities() const {
  std::vector<double> p;
  for (const auto& a : amplitudes) p.push_back(std::norm(a));
  return p;
}

double manybody_delta_e(const ManyBodyBranchTable& t, DeltaEReducer reducer) {
  t.validate();
  const auto p = t.probabilities();
  double rms = 0, linear = 0;
  for (Eigen::Index j = 0; j < t.energies.rows(); ++j) {
    std::vector<double> e(static_cast<std::size_t>(t.energies.cols()));
    for (Eigen::Index i = 0; i < t.energies.cols(); ++i) e[static_cast<std::size_t>(i)] = t.energies(j, i);
    const double s = rms_spread(e, p);
    rms += s * s;
    linear += s;
  }
  return reducer == DeltaEReducer::rms ? std::sqrt(rms) : linear;
}

ScaleInvarianceReport scale_invariance_check(const EnergySuperposition& s, const CollapseConfig& cfg,
                                             const std::vector<std::vector<std::size_t>>& grouping, std::size_t staying) {
  cfg.validate();
  const std::size_t m = s.size();
  std::vector<int> owner(m, -1);
  for (std::size_t g = 0; g < grouping.size(); ++g) {
    if (grouping[g].empty()) throw ContractError("invalid-partition", "empty group");
    for (auto i : grouping[g]) {
      if (i >= m || owner[i] != -1) throw ContractError("invalid-partition", "index repeated or out of range");
      owner[i] = static_cast<int>(g);
    }
  }
  if (std::find(owner.begin(), owner.end(), -1) != owner.end())
    throw ContractError("invalid-partition", "grouping does not cover every branch");
  if (staying >= m) throw DimensionMismatch("staying index out of range");
  const double k = collapse_rate(s, cfg);
  const auto before = s.probabilities();
  const auto after = collapse_update(s, staying, k, cfg).probabilities();
  ScaleInvarianceReport r;
  for (std::size_t g = 0; g < grouping.size(); ++g) {
    double pb = 0, pa = 0;
    for (auto i : grouping[g]) {
      pb += before[i];
      pa += after[i];
    }
    const bool holds = static_cast<int>(g) == owner[staying];
    const double two = holds ? pb + k * (1.0 - pb) : (1.0 - k) * pb;
    r.group_before.push_back(pb);
    r.group_after.push_back(pa);
    r.two_level_after.push_back(two);
    r.max_deviation = std::max(r.max_deviation, std::abs(pa - two));
    r.group_sum += pa;
  }
  r.passed = r.max_deviation <= 1e-14 && std::abs(r.group_sum - 1.0) <= 1e-14;
  return r;
}

std::vector<double> horizon_energy_levels(double radius_m, Massless, std::size_t n_max) {
  if (!(radius_m > 0) || n_max < 1) throw DomainError("need R_U > 0 and n_max >= 1");
  std::vector<double> e;
  const double e1 = constants::h_ev_s * constants::c_m_per_s / (4.0 * radius_m);
  for (std::size_t n = 1; n <= n_max; ++n) e.push_back(static_cast<double>(n * n) * e1);
  return e;
}

std::vector<double> horizon_energy_levels(double radius_m, Massive particle, std::size_t n_max) {
  if (!(radius_m > 0) || n_max < 1 || !(particle.mass_ev > 0)) throw DomainError("need R_U > 0, m > 0, n_max >= 1");
  const double hc = constants::h_ev_s * constants::c_m_per_s;
  const double e1 = hc * hc / (32.0 * particle.mass_ev * radius_m * radius_m);
  std::vector<double> e;
  for (std::size_t n = 1; n <= n_max; ++n) e.push_back(static_cast<double>(n * n) * e1);
  return e;
}

std::vector<CalculatorScenario> reference_scenarios() {
  return {
      {"photon-superposition", 1e-6, 1e25},
      {"squid", 8.6e-6, 1e23},
      {"ta180-isomer", 7.5e4, 1.2e3},
      {"geiger-counter", 1e9, 1e-5},
      {"avalanche-photodiode", 2.5e11, 1.25e-10},
      {"single-neuron", 1e4, 1e5},
  };
}

std::vector<CalculatorRow> collapse_time_table(const std::vector<CalculatorScenario>& scenarios,
                                               const CollapseConfig& cfg) {
  std::vector<CalculatorRow> rows;
  for (const auto& s : scenarios) {
    CalculatorRow r;
    r.name = s.name;
    r.delta_e_ev = s.delta_e_ev;
    r.tau_c_s = collapse_time(s.delta_e_ev, cfg);
    r.reference_s = s.target_s;
    r.ratio = s.target_s > 0 ? r.tau_c_s / s.target_s : 0.0;
    r.decade_gap = s.target_s > 0
                       ? static_cast<int>(std::abs(std::lround(std::log10(r.tau_c_s)) - std::lround(std::log10(s.target_s))))
                       : 0;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace qrdm
