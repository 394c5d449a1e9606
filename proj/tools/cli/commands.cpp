#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "qrdm/beable.hpp"
#include "qrdm/collapse.hpp"
#include "qrdm/errors.hpp"
#include "qrdm/frames.hpp"
#include "qrdm/io.hpp"
#include "qrdm/protective.hpp"
#include "qrdm/random.hpp"
#include "qrdm/rdm.hpp"
#include "qrdm/schrodinger.hpp"
#include "qrdm/stats.hpp"
#include "qrdm/verify.hpp"

namespace qrdm::cli {

namespace fs = std::filesystem;

namespace {

// Metadata plus one table; written as '#' header lines and CSV rows, or as one JSON object.
struct Report {
  json meta = json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;

  void row(std::vector<json> r) { rows.push_back(std::move(r)); }
};

std::string cell(const json& v) {
  if (v.is_number_float()) return io::format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

void write_report(std::ostream& out, const Report& r, const std::string& format) {
  if (format == "json") {
    json j = r.meta;
    json rows = json::array();
    for (const auto& row : r.rows) {
      json o = json::object();
      for (std::size_t i = 0; i < r.columns.size(); ++i) o[r.columns[i]] = row[i];
      rows.push_back(o);
    }
    j["rows"] = rows;
    out << j.dump(2) << '\n';
    return;
  }
  for (const auto& [k, v] : r.meta.items()) out << "# " << k << '=' << cell(v) << '\n';
  for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "," : "") << r.columns[i];
  out << '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell(row[i]);
    out << '\n';
  }
}

class Context {
 public:
  Context(const Scenario& s, const RunOptions& o) : scenario(s), options(o), params(s.params, "params") {
    seed = o.seed ? *o.seed : s.seed;
  }

  template <class F>
  void emit(const std::string& kind, const std::string& ext, F&& writer) {
    const std::string file = scenario.name + "." + kind + "." + ext;
    std::ofstream out(fs::path(options.out_dir) / file, std::ios::binary);
    if (!out) throw ScenarioError("cannot write " + (fs::path(options.out_dir) / file).string());
    writer(out);
    if (!out) throw NumericError("io", "write failed for " + file);
    outputs.push_back(file);
  }

  void emit_report(const std::string& kind, const Report& r) {
    emit(kind, ext(), [&](std::ostream& out) { write_report(out, r, options.format); });
  }

  std::string ext() const { return options.format; }

  const Scenario& scenario;
  const RunOptions& options;
  Params params;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
};

// ---- parameter decoding ----

ComplexVectorState state_param(const Params& p, const std::string& key) {
  try {
    return io::state_from_json(p.raw(key).dump());
  } catch (const ContractError& e) {
    throw ScenarioError(p.where() + "." + key + ": " + e.what());
  }
}

HermitianOperator operator_param(const Params& p, const std::string& key) {
  if (p.has(key + "_diagonal")) return HermitianOperator::diagonal(p.numbers(key + "_diagonal"));
  try {
    return io::operator_from_json(p.raw(key).dump());
  } catch (const ContractError& e) {
    throw ScenarioError(p.where() + "." + key + ": " + e.what());
  }
}

IndexRange range_param(const Params& p, const std::string& key) {
  const auto v = p.counts(key);
  if (v.size() != 2 || v[0] >= v[1]) throw ScenarioError(p.where() + "." + key + " must be [begin, end) with begin < end");
  return {v[0], v[1]};
}

UnitMode units_param(const Params& p) {
  const auto u = p.text("units", "natural");
  if (u == "natural") return UnitMode::natural;
  if (u == "physical") return UnitMode::physical_ev;
  throw ScenarioError(p.where() + ".units must be natural or physical");
}

EnergySuperposition superposition_param(const Params& p) {
  const auto e = p.numbers("energies");
  const auto mode = units_param(p);
  if (p.has("probabilities")) return EnergySuperposition::from_probabilities(e, p.numbers("probabilities"), mode);
  const auto amps = state_param(p, "amplitudes");
  std::vector<Complex> a(amps.amplitudes().data(), amps.amplitudes().data() + amps.dim());
  return EnergySuperposition(e, a, mode);
}

CollapseConfig collapse_param(const Params& p, std::uint64_t seed) {
  CollapseConfig c = units_param(p) == UnitMode::physical_ev ? CollapseConfig::physical() : CollapseConfig::natural();
  const auto mode = p.text("k_mode", "dynamic");
  if (mode == "frozen") {
    c.k_mode = KMode::frozen;
    c.frozen_k = p.number("k");
  } else if (mode != "dynamic") {
    throw ScenarioError(p.where() + ".k_mode must be dynamic or frozen");
  }
  const auto reducer = p.text("reducer", "rms");
  if (reducer == "linear_sum") c.reducer = DeltaEReducer::linear_sum;
  else if (reducer != "rms") throw ScenarioError(p.where() + ".reducer must be rms or linear_sum");
  c.planck_time = p.number("planck_time", c.planck_time);
  c.hbar = p.number("hbar", c.hbar);
  c.collapse_epsilon = p.number("epsilon", c.collapse_epsilon);
  c.seed = seed;
  c.validate();
  return c;
}

GridSpec grid_param(const Params& p) {
  return {p.number("x0"), p.number("dx"), p.number("mass", 1.0), p.number("hbar", 1.0)};
}

std::vector<BranchRegions> branches_param(const Params& p) {
  const auto& list = p.raw("branches");
  if (!list.is_array() || list.empty()) throw ScenarioError(p.where() + ".branches must be a non-empty list");
  std::vector<BranchRegions> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Params b(list[i], p.where() + ".branches[" + std::to_string(i) + "]");
    out.push_back({b.number("weight"), range_param(b, "particle1"), range_param(b, "particle2")});
  }
  return out;
}

const json kEmpty = json::object();

// ---- subcommands ----

std::string rdm_sample(Context& cx) {
  const auto& p = cx.params;
  const std::size_t n = p.count("instants");
  const double dt = p.number("dt", 1.0);
  const bool binary = p.flag("binary", false);
  std::ostringstream summary;
  if (p.has("entangled")) {
    const auto branches = branches_param(p.child("entangled"));
    const auto t = sample_entangled_stays(branches, n, cx.seed, dt);
    cx.emit("trajectory", "csv", [&](std::ostream& o) { io::write_trajectory_csv(o, t); });
    if (binary) cx.emit("trajectory", "stay", [&](std::ostream& o) { io::write_trajectory_binary(o, t); });
    Report r;
    r.meta = {{"instants", n}, {"seed", cx.seed}};
    r.columns = {"branch", "weight", "fraction"};
    std::vector<std::size_t> hits(branches.size(), 0);
    for (auto b : t.branches) ++hits[b];
    for (std::size_t i = 0; i < branches.size(); ++i)
      r.row({static_cast<std::uint64_t>(i), branches[i].weight, static_cast<double>(hits[i]) / static_cast<double>(n)});
    cx.emit_report("branches", r);
    summary << "branch-0 fraction " << io::format_double(static_cast<double>(hits[0]) / static_cast<double>(n));
    return summary.str();
  }
  std::vector<double> exact;
  StayTrajectory t;
  std::size_t sites = 0;
  IndexRange box1{};
  if (p.has("two_box")) {
    const auto b = p.child("two_box");
    sites = b.count("sites");
    const GridSpec spec{b.number("x0", 0.0), b.number("dx")};
    box1 = range_param(b, "box1");
    const auto psi = two_box_state(spec, sites, box1, range_param(b, "box2"), b.number("weight1"));
    t = sample_stays(psi, n, cx.seed, dt);
    for (std::size_t k = 0; k < sites; ++k) exact.push_back(std::norm(psi[k]) * spec.dx);
  } else {
    exact = p.numbers("probabilities");
    sites = exact.size();
    t = sample_stays(exact, n, cx.seed, dt);
  }
  cx.emit("trajectory", "csv", [&](std::ostream& o) { io::write_trajectory_csv(o, t); });
  if (binary) cx.emit("trajectory", "stay", [&](std::ostream& o) { io::write_trajectory_binary(o, t); });
  const std::size_t bins = p.count("bins", sites);
  if (bins == 0 || sites % bins != 0) throw ScenarioError("params.bins must divide the site count");
  std::vector<double> exact_bins(bins, 0.0);
  for (std::size_t k = 0; k < sites; ++k) exact_bins[k / (sites / bins)] += exact[k];
  const auto h = empirical_density(t, sites, bins);
  Report r;
  r.meta = {{"instants", n}, {"seed", cx.seed}, {"total_variation", stats::total_variation(exact_bins, h)}};
  r.columns = {"bin", "first_site", "empirical", "exact"};
  for (std::size_t b = 0; b < bins; ++b)
    r.row({static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(b * (sites / bins)), h[b], exact_bins[b]});
  cx.emit_report("density", r);
  summary << "TV " << io::format_double(r.meta["total_variation"].get<double>());
  if (box1.size() > 0) {
    std::size_t in = 0;
    for (auto s : t.stays) in += s >= box1.begin && s < box1.end;
    summary << ", box-1 fraction " << io::format_double(static_cast<double>(in) / static_cast<double>(n));
  }
  return summary.str();
}

std::string beable_run(Context& cx) {
  const auto& p = cx.params;
  const auto h = operator_param(p, "hamiltonian");
  const auto psi = state_param(p, "state");
  const double dt = p.number("dt");
  const std::size_t steps = p.count("steps");
  EnsembleOptions opt;
  opt.trajectories = p.count("trajectories", 10000);
  opt.slices = p.count("slices", 10);
  opt.seed = cx.seed;
  opt.threads = cx.options.threads;
  opt.jump.hbar = p.number("hbar", 1.0);
  opt.jump.noise = p.number("noise", 0.0);
  const auto report = run_equivariance(h, psi, dt, steps, opt);
  cx.emit("equivariance", "json", [&](std::ostream& o) { io::write_equivariance_json(o, report); });
  if (cx.options.format == "csv") {
    Report r;
    r.meta = {{"max_detailed_residual", report.max_detailed_residual}, {"seed", cx.seed}};
    r.columns = {"step", "t", "site", "expected", "count", "p_value"};
    for (const auto& s : report.slices)
      for (std::size_t k = 0; k < s.counts.size(); ++k)
        r.row({static_cast<std::uint64_t>(s.step), s.t, static_cast<std::uint64_t>(k), s.expected[k],
               static_cast<std::uint64_t>(s.counts[k]), s.p_value});
    cx.emit_report("slices", r);
  }
  if (p.flag("sample_trajectory", true)) {
    const JumpSchedule schedule(h, psi, dt, steps, opt.jump);
    Rng rng(cx.seed);
    const auto p0 = born_probabilities(psi);
    std::vector<double> cdf(p0.size());
    std::partial_sum(p0.begin(), p0.end(), cdf.begin());
    const auto start = static_cast<std::uint32_t>(rng.pick(cdf));
    const auto t = schedule.sample(start, derive_seed(cx.seed, opt.trajectories));
    cx.emit("trajectory", "csv", [&](std::ostream& o) { io::write_trajectory_csv(o, t); });
  }
  return "min slice p " + io::format_double(report.min_p_value()) + ", detailed residual " +
         io::format_double(report.max_detailed_residual);
}

std::string collapse_run(Context& cx) {
  const auto& p = cx.params;
  const auto s0 = superposition_param(p.child("state"));
  const auto cfg = collapse_param(p.has("config") ? p.child("config") : Params(kEmpty, "params.config"), cx.seed);
  const std::size_t max_steps = p.count("max_steps", 10000000);
  Rng rng(derive_seed(cx.seed, 0));
  const auto t = run_trajectory(s0, cfg, max_steps, rng, true);
  cx.emit("trajectory", "csv", [&](std::ostream& o) { io::write_collapse_trajectory_csv(o, t); });
  std::ostringstream summary;
  summary << "outcome " << (t.outcome ? std::to_string(*t.outcome) : std::string("none")) << " after " << t.steps
          << " steps";
  const std::size_t trials = p.count("trials", 1);
  if (trials > 1) {
    const auto o = outcome_statistics(s0, cfg, trials, max_steps, cx.options.threads);
    const auto born = merge_degenerate(s0).probabilities();
    Report r;
    const double med = o.steps_to_collapse.empty() ? 0.0 : stats::median(o.steps_to_collapse);
    r.meta = {{"trials", trials}, {"undecided", o.undecided}, {"median_steps", med}, {"seed", cx.seed}};
    if (cfg.k_mode == KMode::frozen) r.meta["median_steps_k2"] = med * cfg.frozen_k * cfg.frozen_k;
    std::vector<std::size_t> counts(o.outcome_counts.begin(), o.outcome_counts.end());
    r.meta["chi2_p_value"] = stats::chi_square_gof(counts, born).p_value;
    r.columns = {"branch", "born", "count", "frequency"};
    for (std::size_t i = 0; i < counts.size(); ++i)
      r.row({static_cast<std::uint64_t>(i), born[i], static_cast<std::uint64_t>(counts[i]),
             static_cast<double>(counts[i]) / static_cast<double>(trials)});
    cx.emit_report("outcomes", r);
    summary << "; " << trials << " trials, median steps " << io::format_double(med);
  }
  return summary.str();
}

std::string collapse_ensemble(Context& cx) {
  const auto& p = cx.params;
  const auto s0 = superposition_param(p.child("state"));
  const auto cfg = collapse_param(p.has("config") ? p.child("config") : Params(kEmpty, "params.config"), cx.seed);
  const std::size_t trials = p.count("trials");
  const std::size_t steps = p.count("steps");
  const std::size_t stride = p.count("stride", std::max<std::size_t>(1, steps / 10));
  const auto slices = ensemble_statistics(s0, cfg, trials, steps, stride, cx.options.threads);
  if (cx.options.format == "json")
    cx.emit("ensemble", "json", [&](std::ostream& o) { io::write_ensemble_json(o, slices); });
  else
    cx.emit("ensemble", "csv", [&](std::ostream& o) { io::write_ensemble_csv(o, slices); });
  const bool write = p.flag("write_trajectories", trials == 1);
  if (write) {
    if (trials > 100) throw ScenarioError("params.write_trajectories is limited to 100 trials");
    for (std::size_t i = 0; i < trials; ++i) {
      Rng rng(derive_seed(cx.seed, i));
      const auto t = run_trajectory(s0, cfg, steps, rng, true);
      cx.emit("trial-" + std::to_string(i), "csv", [&](std::ostream& o) { io::write_collapse_trajectory_csv(o, t); });
    }
  }
  const auto& last = slices.back();
  return "step " + std::to_string(last.step) + " mean P0 " + io::format_double(last.mean_p[0]) + " +- " +
         io::format_double(last.se_p[0]);
}

std::string tau_c(Context& cx) {
  const auto& p = cx.params;
  const auto cfg = CollapseConfig::physical();
  std::vector<CalculatorScenario> systems;
  if (p.has("systems")) {
    const auto& list = p.raw("systems");
    if (!list.is_array()) throw ScenarioError("params.systems must be a list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Params s(list[i], "params.systems[" + std::to_string(i) + "]");
      systems.push_back({s.text("name"), s.number("delta_e"), s.number("target", 0.0)});
    }
  } else {
    systems = reference_scenarios();
  }
  const auto rows = collapse_time_table(systems, cfg);
  cx.emit("table", "csv", [&](std::ostream& o) { io::write_calculator_csv(o, rows); });
  if (cx.options.format == "json") {
    Report r;
    r.columns = {"name", "delta_e_ev", "tau_c_s", "reference_s", "ratio", "decade_gap"};
    for (const auto& x : rows) r.row({x.name, x.delta_e_ev, x.tau_c_s, x.reference_s, x.ratio, x.decade_gap});
    cx.emit_report("table", r);
  }
  if (p.has("relativistic")) {
    const auto& list = p.raw("relativistic");
    if (!list.is_array()) throw ScenarioError("params.relativistic must be a list");
    Report r;
    r.meta = {{"regime", RelativisticCollapseTime{}.regime}, {"c_m_per_s", constants::c_m_per_s}};
    r.columns = {"delta_e_ev", "v_m_per_s", "tau_s", "factor", "fraction_vs_rest"};
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Params s(list[i], "params.relativistic[" + std::to_string(i) + "]");
      const double de = s.number("delta_e");
      const auto rt = relativistic_collapse_time(de, s.number("v"), cfg);
      r.row({de, s.number("v"), rt.tau, rt.factor, rt.tau / collapse_time(de, cfg) - 1});
    }
    cx.emit_report("relativistic", r);
  }
  std::size_t within = 0;
  for (const auto& x : rows) within += x.decade_gap <= 1;
  return std::to_string(within) + "/" + std::to_string(rows.size()) + " systems within one decade";
}

ProtectiveSetup protective_param(const Params& p, std::size_t projections) {
  ProtectiveSetup s{state_param(p, "state"), operator_param(p, "observable"), projections, p.number("tau", 1.0)};
  const auto prof = p.text("profile", "constant");
  if (prof == "triangular") s.profile = CouplingProfile::triangular;
  else if (prof != "constant") throw ScenarioError("params.profile must be constant or triangular");
  s.validate();
  return s;
}

PointerState pointer_param(const Params& p) {
  if (!p.has("pointer")) return PointerState::gaussian(0.0, 4.0, 1024, 128.0);
  const auto q = p.child("pointer");
  return PointerState::gaussian(q.number("center", 0.0), q.number("width"), q.count("samples"), q.number("length"));
}

std::string protect_run(Context& cx) {
  const auto& p = cx.params;
  const auto setup = protective_param(p, p.count("projections"));
  const auto pointer = pointer_param(p);
  const auto r = zeno_protective_run(setup, pointer);
  Report rep;
  rep.meta = {{"pointer_shift", r.pointer_shift},       {"ensemble_shift", r.ensemble_shift},
              {"expected_shift", r.expected_shift},     {"survival_probability", r.survival_probability},
              {"final_width", r.final_width},           {"width_ratio", r.width_ratio},
              {"protection_failed", r.protection_failed}, {"diagnostics", r.diagnostics},
              {"integrated_shift", integrated_pointer_shift(setup)}};
  if (p.flag("first_order", false)) {
    const auto f = first_order_branch_check(setup, pointer);
    rep.meta["first_order"] = {{"orthogonal_amplitude", f.orthogonal_amplitude}, {"predicted", f.predicted},
                               {"residual", f.residual}};
  }
  rep.columns = {"step", "shift", "integrated_g"};
  for (const auto& c : r.checkpoints) rep.row({static_cast<std::uint64_t>(c.step), c.shift, c.integrated_g});
  cx.emit_report("protective", rep);
  if (cx.options.format == "json")
    cx.emit("pointer", "json", [&](std::ostream& o) { io::write_snapshot_json(o, r.final_pointer.grid()); });
  else
    cx.emit("pointer", "csv", [&](std::ostream& o) { io::write_snapshot_csv(o, r.final_pointer.grid()); });
  return "shift " + io::format_double(r.pointer_shift) + " (<A> " + io::format_double(r.expected_shift) +
         "), survival " + io::format_double(r.survival_probability) +
         (r.protection_failed ? ", protection failed" : "");
}

std::string protect_sweep(Context& cx) {
  const auto& p = cx.params;
  const auto ns = p.counts("projections");
  if (ns.empty()) throw ScenarioError("params.projections must list at least one N");
  const auto pointer = pointer_param(p);
  Report rep;
  rep.columns = {"N", "shift", "shift_error", "survival", "width_ratio"};
  std::vector<double> x, deficit;
  for (std::size_t n : ns) {
    const auto setup = protective_param(p, n);
    const auto r = zeno_protective_run(setup, pointer);
    rep.row({static_cast<std::uint64_t>(n), r.pointer_shift, std::abs(r.pointer_shift - r.expected_shift),
             r.survival_probability, r.width_ratio});
    x.push_back(static_cast<double>(n));
    deficit.push_back(1 - r.survival_probability);
  }
  std::string summary = std::to_string(ns.size()) + " runs";
  if (ns.size() > 1 && std::all_of(deficit.begin(), deficit.end(), [](double d) { return d > 0; })) {
    rep.meta["survival_deficit_slope"] = stats::loglog_slope(x, deficit);
    summary += ", survival deficit slope " + io::format_double(rep.meta["survival_deficit_slope"].get<double>());
  }
  cx.emit_report("sweep", rep);
  return summary;
}

std::string tomography_cmd(Context& cx) {
  const auto& p = cx.params;
  const auto g = p.child("grid");
  const GridSpec spec = grid_param(g);
  const std::size_t n = g.count("samples");
  GridWavefunction truth = [&] {
    if (p.has("plane_wave")) return plane_wave(spec, n, p.child("plane_wave").number("momentum"));
    const auto w = p.child("packet");
    return gaussian_packet(spec, n, w.number("center", 0.0), w.number("width"), w.number("momentum", 0.0));
  }();
  std::vector<std::size_t> regions = p.raw("regions").is_array() ? p.counts("regions")
                                                                  : std::vector<std::size_t>{p.count("regions")};
  Report rep;
  rep.columns = {"regions", "region_width", "l2_error", "density_fidelity", "flux_fidelity"};
  std::vector<double> widths, errors;
  std::optional<TomographyResult> finest;
  std::size_t finest_m = 0;
  for (std::size_t m : regions) {
    auto r = tomography(truth, uniform_partition(n, m));
    const double w = truth.length() / static_cast<double>(m);
    rep.row({static_cast<std::uint64_t>(m), w, r.l2_error, r.density_fidelity, r.flux_fidelity});
    widths.push_back(w);
    errors.push_back(r.l2_error);
    if (m > finest_m) {
      finest_m = m;
      finest = std::move(r);
    }
  }
  if (regions.size() > 1 && std::all_of(errors.begin(), errors.end(), [](double e) { return e > 0; }))
    rep.meta["error_slope"] = stats::loglog_slope(widths, errors);
  cx.emit("tomography", "json", [&](std::ostream& o) { write_report(o, rep, "json"); });
  if (cx.options.format == "csv") cx.emit_report("tomography", rep);
  cx.emit("reconstructed", "csv", [&](std::ostream& o) { io::write_snapshot_csv(o, finest->reconstructed); });
  std::string summary = "l2 error " + io::format_double(errors.back()) + " at " + std::to_string(regions.back()) +
                        " regions";
  if (rep.meta.contains("error_slope"))
    summary += ", slope " + io::format_double(rep.meta["error_slope"].get<double>());
  return summary;
}

std::string frames_analyze(Context& cx) {
  const auto& p = cx.params;
  const double c = p.number("c", 1.0);
  Report rep;
  rep.meta = {{"c", c}};
  std::vector<std::string> parts;
  if (p.has("events")) {
    const double v = p.number("velocity");
    const auto& list = p.raw("events");
    if (!list.is_array()) throw ScenarioError("params.events must be a list of [t, x] pairs");
    std::vector<Event> in, all;
    for (const auto& e : list) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw ScenarioError("params.events entries must be [t, x]");
      in.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    for (const auto& e : in) all.push_back(e);
    for (const auto& e : in) all.push_back(lorentz_transform(e, v, c));
    cx.emit("events", "csv", [&](std::ostream& o) { io::write_events_csv(o, all); });
    if (in.size() >= 2) {
      try {
        rep.meta["simultaneity_velocity"] = simultaneity_frame(in[0], in[1], c);
      } catch (const NoSuchFrame& e) {
        rep.meta["simultaneity_velocity"] = nullptr;
        rep.meta["simultaneity_note"] = e.what();
      }
    }
    parts.push_back(std::to_string(in.size()) + " events boosted");
  }
  if (p.has("synchrony")) {
    const auto s = p.child("synchrony");
    const SynchronyParams sp{s.number("v"), s.number("k", 0.0), s.number("k_prime", 0.0)};
    const auto w = one_way_speeds(sp, c);
    rep.meta["one_way"] = {{"plus_x", w.plus_x}, {"minus_x", w.minus_x}, {"plus_x_prime", w.plus_x_prime},
                           {"minus_x_prime", w.minus_x_prime}, {"eta", edwards_winnie_eta(sp, c)}};
    parts.push_back("one-way speeds");
  }
  if (p.has("window")) {
    const auto w = p.child("window");
    const auto cw = collapse_window(w.number("t", 0.0), w.number("x1"), w.number("x2"), w.number("v"), c);
    rep.meta["collapse_window"] = {{"t1_prime", cw.t1_prime}, {"t2_prime", cw.t2_prime}, {"begin", cw.begin},
                                   {"end", cw.end}};
    parts.push_back("collapse window");
  }
  rep.columns = {"velocity", "pairs", "kept", "reversed", "reversed_fraction", "tolerance"};
  if (p.has("correlation")) {
    const auto q = p.child("correlation");
    const auto branches = branches_param(q);
    const auto t = sample_entangled_stays(branches, q.count("instants"), cx.seed, q.number("dt", 1.0));
    const auto geo = q.child("geometry");
    const SiteGeometry geometry{geo.number("x0"), geo.number("dx")};
    const double tol = q.number("tolerance", 0.0);
    for (double v : q.numbers("velocities")) {
      const auto s = boosted_correlation_stats(t, geometry, v, tol, c);
      rep.row({v, static_cast<std::uint64_t>(s.pairs), static_cast<std::uint64_t>(s.kept),
               static_cast<std::uint64_t>(s.reversed), s.reversed_fraction, s.tolerance});
    }
    double ab = 0;
    if (branches.size() == 2) ab = 2 * branches[0].weight * branches[1].weight;
    rep.meta["predicted_reversed_fraction"] = ab;
    rep.meta["seed"] = cx.seed;
    parts.push_back(std::to_string(rep.rows.size()) + " boosted correlation scans");
  }
  if (parts.empty()) throw ScenarioError("frames-analyze needs events, synchrony, window or correlation");
  cx.emit("frames", "json", [&](std::ostream& o) { write_report(o, rep, "json"); });
  if (cx.options.format == "csv" && !rep.rows.empty()) cx.emit_report("correlation", rep);
  std::string summary;
  for (std::size_t i = 0; i < parts.size(); ++i) summary += (i ? ", " : "") + parts[i];
  return summary;
}

std::string verify_cmd(Context& cx, bool& ok) {
  const auto suites = verify::run_all(cx.seed);
  Report rep;
  rep.meta = {{"seed", cx.seed}};
  rep.columns = {"suite", "check", "passed", "detail"};
  std::ostringstream summary;
  std::size_t failed = 0;
  for (const auto& s : suites) {
    for (const auto& c : s.checks) rep.row({s.suite, c.name, c.passed, c.detail});
    summary << (summary.tellp() > 0 ? ", " : "") << s.suite << " " << s.passed() << "/" << s.checks.size();
    failed += s.failed();
  }
  ok = failed == 0;
  cx.emit_report("verify", rep);
  return summary.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"rdm-sample", "beable-run",   "collapse-run", "collapse-ensemble",
                                              "tau-c",      "protect-run",  "protect-sweep", "tomography",
                                              "frames-analyze", "verify"};
  return names;
}

std::optional<Scenario> default_scenario(const std::string& subcommand) {
  if (subcommand != "verify" && subcommand != "tau-c") return std::nullopt;
  Scenario s;
  s.name = subcommand;
  s.command = subcommand;
  s.seed = 1;
  return s;
}

RunResult run_scenario(const std::string& subcommand, const Scenario& scenario, const RunOptions& options) {
  if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end())
    throw ScenarioError("unknown subcommand '" + subcommand + "'");
  if (!scenario.command.empty() && scenario.command != subcommand)
    throw ScenarioError("scenario '" + scenario.name + "' is for " + scenario.command + ", not " + subcommand);
  if (options.format != "csv" && options.format != "json") throw ScenarioError("--format must be csv or json");
  if (options.threads == 0) throw ScenarioError("--threads must be positive");
  std::error_code ec;
  fs::create_directories(options.out_dir, ec);
  if (ec) throw ScenarioError("cannot create output directory " + options.out_dir + ": " + ec.message());

  const auto start = std::chrono::steady_clock::now();
  Context cx(scenario, options);
  RunResult result;
  if (subcommand == "rdm-sample") result.summary = rdm_sample(cx);
  else if (subcommand == "beable-run") result.summary = beable_run(cx);
  else if (subcommand == "collapse-run") result.summary = collapse_run(cx);
  else if (subcommand == "collapse-ensemble") result.summary = collapse_ensemble(cx);
  else if (subcommand == "tau-c") result.summary = tau_c(cx);
  else if (subcommand == "protect-run") result.summary = protect_run(cx);
  else if (subcommand == "protect-sweep") result.summary = protect_sweep(cx);
  else if (subcommand == "tomography") result.summary = tomography_cmd(cx);
  else if (subcommand == "frames-analyze") result.summary = frames_analyze(cx);
  else result.summary = verify_cmd(cx, result.ok);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Scenario effective = scenario;
  effective.seed = cx.seed;
  const json manifest{{"scenario", scenario.name},
                      {"command", subcommand},
                      {"scenario_hash", effective.hash()},
                      {"seed", cx.seed},
                      {"threads", options.threads},
                      {"format", options.format},
                      {"tool_version", kToolVersion},
                      {"constants",
                       {{"hbar_ev_s", constants::hbar_ev_s},
                        {"planck_time_s", constants::planck_time_s},
                        {"c_m_per_s", constants::c_m_per_s}}},
                      {"outputs", cx.outputs},
                      {"summary", result.summary},
                      {"wall_time_s", wall},
                      {"timestamp", utc_timestamp()}};
  cx.emit("manifest", "json", [&](std::ostream& o) { o << manifest.dump(2) << '\n'; });
  result.outputs = cx.outputs;
  return result;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation tools for random discontinuous motion, energy-conserved collapse and protective "
               "measurement.",
               "qrdm"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1, 1);
  std::string scenario_path;
  RunOptions options;
  const char* env_dir = std::getenv("QRDM_OUT_DIR");
  if (env_dir && *env_dir) options.out_dir = env_dir;
  std::uint64_t seed = 0;
  const std::map<std::string, std::string> blurbs{
      {"rdm-sample", "sample position stays and compare occupation with |psi|^2"},
      {"beable-run", "jump-process trajectories on a finite basis"},
      {"collapse-run", "single collapse trajectory or outcome statistics"},
      {"collapse-ensemble", "ensemble averages over collapse trajectories"},
      {"tau-c", "collapse time estimates for reference systems"},
      {"protect-run", "pointer shift under repeated protective projections"},
      {"protect-sweep", "shift and survival over a range of projection counts"},
      {"tomography", "density and flux reconstruction from region occupations"},
      {"frames-analyze", "Lorentz transforms, simultaneity and boosted correlations"},
      {"verify", "run built-in self checks"}};
  for (const auto& name : subcommands()) {
    auto* sub = app.add_subcommand(name, blurbs.at(name));
    sub->add_option("--scenario", scenario_path, "scenario file (YAML)");
    sub->add_option("--seed", seed, "master seed, overrides the scenario");
    sub->add_option("--out-dir", options.out_dir, "output directory (default $QRDM_OUT_DIR or .)");
    sub->add_option("--threads", options.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--format", options.format, "report format")->check(CLI::IsMember({"csv", "json"}));
  }
  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  const auto* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  if (chosen->count("--seed")) options.seed = seed;

  try {
    Scenario s;
    if (!scenario_path.empty()) {
      s = load_scenario_file(scenario_path);
    } else if (auto d = default_scenario(name)) {
      s = *d;
    } else {
      throw ScenarioError(name + " requires --scenario");
    }
    const auto r = run_scenario(name, s, options);
    out << name << ' ' << s.name << ": " << r.summary << " -> " << r.outputs.size() << " files in "
        << options.out_dir << '\n';
    return r.ok ? 0 : 2;
  } catch (const ContractError& e) {
    err << "error[" << e.name() << "]: " << e.what() << '\n';
    return 1;
  } catch (const NumericError& e) {
    err << "error[" << e.name() << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error[internal]: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace qrdm::cli
