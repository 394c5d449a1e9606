#include "qrdm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qrdm/beable.hpp"
#include "qrdm/collapse.hpp"
#include "qrdm/errors.hpp"
#include "qrdm/frames.hpp"
#include "qrdm/hilbert.hpp"
#include "qrdm/protective.hpp"
#include "qrdm/rdm.hpp"
#include "qrdm/schrodinger.hpp"
#include "qrdm/stats.hpp"

namespace qrdm::verify {

std::size_t SuiteResult::passed() const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return c.passed; }));
}

std::size_t SuiteResult::failed() const { return checks.size() - passed(); }

namespace {

class Suite {
 public:
  explicit Suite(std::string name) { r_.suite = std::move(name); }

  void bound(const std::string& name, double value, double limit) {
    std::ostringstream d;
    d << "value " << value << " limit " << limit;
    r_.checks.push_back({name, std::isfinite(value) && value <= limit, d.str()});
  }

  template <class F>
  void run(const std::string& name, F&& f) {
    try {
      f();
    } catch (const std::exception& e) {
      r_.checks.push_back({name, false, std::string("threw ") + e.what()});
    }
  }

  template <class E, class F>
  void throws(const std::string& name, F&& f) {
    try {
      f();
      r_.checks.push_back({name, false, "no exception"});
    } catch (const E&) {
      r_.checks.push_back({name, true, "raised"});
    } catch (const std::exception& e) {
      r_.checks.push_back({name, false, std::string("wrong exception ") + e.what()});
    }
  }

  SuiteResult done() { return std::move(r_); }

 private:
  SuiteResult r_;
};

ComplexVectorState random_state(int dim, Rng& rng) {
  std::normal_distribution<double> n;
  ComplexVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Complex(n(rng.engine()), n(rng.engine()));
  return ComplexVectorState::normalized(v);
}

HermitianOperator random_hermitian(int dim, Rng& rng) {
  std::normal_distribution<double> n;
  ComplexMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = Complex(n(rng.engine()), n(rng.engine()));
  return HermitianOperator(0.5 * (m + m.adjoint()));
}

}  // namespace

SuiteResult hilbert_suite(std::uint64_t seed) {
  Suite s("hilbert");
  Rng rng(seed);
  s.run("born-sum", [&] {
    double worst = 0;
    for (int i = 0; i < 200; ++i) {
      const auto p = born_probabilities(random_state(1 + i % 8, rng));
      double t = 0;
      for (double v : p) t += v;
      worst = std::max(worst, std::abs(t - 1.0));
    }
    s.bound("born-sum", worst, 1e-12);
  });
  s.run("pbr-zeros", [&] {
    const auto t = pbr_orthogonality_table();
    double worst = 0;
    for (int j = 0; j < 4; ++j) worst = std::max(worst, t[j][j]);
    s.bound("pbr-zeros", worst, 1e-12);
  });
  s.run("hardy", [&] { s.bound("hardy", hardy_unitary_check().passed ? 0.0 : 1.0, 0.0); });
  s.throws<NormalizationError>("unnormalized-state", [] { ComplexVectorState::from({1.0, 1.0}); });
  return s.done();
}

SuiteResult schrodinger_suite(std::uint64_t seed) {
  Suite s("schrodinger");
  (void)seed;
  s.run("norm-conservation", [&] {
    GridSpec spec{-32.0, 0.125};
    const auto psi = gaussian_packet(spec, 512, 0.0, 2.0, 1.0);
    const auto out = evolve_grid(psi, std::vector<double>(512, 0.0), 0.01, 200);
    s.bound("norm-conservation", std::abs(out.norm() - 1.0), 1e-10);
  });
  s.run("round-trip", [&] {
    GridSpec spec{-32.0, 0.125};
    const auto psi = gaussian_packet(spec, 512, 0.0, 2.0, 0.7);
    const auto back = reconstruct_wavefunction(densities(psi), 1.0, 1.0);
    s.bound("round-trip", l2_distance_up_to_phase(psi, back), 1e-8);
  });
  s.run("dispersion", [&] { s.bound("dispersion", dispersion_check(0.5, 1.0, 1.0, 1e-3), 1e-5); });
  return s.done();
}

SuiteResult rdm_suite(std::uint64_t seed) {
  Suite s("rdm");
  s.run("empirical-density", [&] {
    const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
    const auto t = sample_stays(p, 20000, seed);
    const auto e = empirical_density(t, 4, 4);
    s.bound("empirical-density", stats::total_variation(p, e), 0.02);
  });
  s.run("entangled-branches", [&] {
    const std::vector<BranchRegions> b{{0.5, {0, 10}, {90, 100}}, {0.5, {90, 100}, {0, 10}}};
    const auto t = sample_entangled_stays(b, 1000, seed);
    std::size_t bad = 0;
    for (std::size_t i = 0; i < t.instants(); ++i) {
      const bool left1 = t.stays1[i] < 10;
      if (left1 != (t.branches[i] == 0)) ++bad;
    }
    s.bound("entangled-branches", static_cast<double>(bad), 0.0);
  });
  return s.done();
}

SuiteResult beable_suite(std::uint64_t seed) {
  Suite s("beable");
  Rng rng(seed);
  s.run("detailed-relation", [&] {
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
      const int d = 2 + i % 3;
      const auto h = random_hermitian(d, rng);
      const auto psi = random_state(d, rng);
      const auto j = probability_current(h, psi);
      const auto p = born_probabilities(psi);
      worst = std::max(worst, detailed_relation_residual(j, bell_transition_rates(j, p), p));
    }
    s.bound("detailed-relation", worst, 1e-12);
  });
  s.run("schedule-columns", [&] {
    const auto h = random_hermitian(3, rng);
    const JumpSchedule sched(h, random_state(3, rng), 1e-3, 50);
    double worst = 0;
    for (std::size_t k = 0; k < sched.steps(); ++k) {
      const RealMatrix m = sched.step_matrix(k);
      for (Eigen::Index c = 0; c < m.cols(); ++c) worst = std::max(worst, std::abs(m.col(c).sum() - 1.0));
    }
    s.bound("schedule-columns", worst, 1e-12);
  });
  return s.done();
}

SuiteResult collapse_suite(std::uint64_t seed) {
  Suite s("collapse");
  s.run("probability-sum", [&] {
    const std::vector<double> e{0.0, 0.1, 0.25, 0.4};
    const std::vector<double> p{0.25, 0.25, 0.25, 0.25};
    auto cfg = CollapseConfig::natural();
    cfg.seed = seed;
    const auto t = run_trajectory(EnergySuperposition::from_probabilities(e, p), cfg, 2000);
    double worst = 0;
    for (const auto& row : t.probabilities) {
      double sum = 0;
      for (double v : row) sum += v;
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    s.bound("probability-sum", worst, 1e-12);
  });
  s.run("scale-invariance", [&] {
    const std::vector<double> e{0.0, 0.1, 0.2, 0.3};
    const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
    const auto r = scale_invariance_check(EnergySuperposition::from_probabilities(e, p), CollapseConfig::natural(),
                                          {{0, 1}, {2, 3}}, 2);
    s.bound("scale-invariance", r.max_deviation, 1e-14);
  });
  s.throws<SuperPlanckianError>("super-planckian", [] {
    const std::vector<double> e{0.0, 4.0};
    const std::vector<double> p{0.5, 0.5};
    Rng r(1);
    collapse_step(EnergySuperposition::from_probabilities(e, p), CollapseConfig::natural(), r);
  });
  return s.done();
}

SuiteResult protective_suite(std::uint64_t seed) {
  Suite s("protective");
  (void)seed;
  s.run("eigenstate-shift", [&] {
    const std::vector<double> a{0.3, -0.2};
    ProtectiveSetup setup{ComplexVectorState::basis(2, 0), HermitianOperator::diagonal(a), 200};
    const auto run = zeno_protective_run(setup, PointerState::gaussian(0.0, 4.0, 512, 128.0));
    s.bound("eigenstate-shift", std::abs(run.pointer_shift - 0.3), 1e-9);
  });
  s.run("simpson-shift", [&] {
    const std::vector<double> a{1.0, 0.0};
    ProtectiveSetup setup{ComplexVectorState::from({0.6, 0.8}), HermitianOperator::diagonal(a), 100, 2.0,
                          CouplingProfile::triangular};
    s.bound("simpson-shift", std::abs(integrated_pointer_shift(setup) - 0.36), 1e-10);
  });
  return s.done();
}

SuiteResult frames_suite(std::uint64_t seed) {
  Suite s("frames");
  Rng rng(seed);
  s.run("interval", [&] {
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
      const Event a{rng.uniform() * 10 - 5, rng.uniform() * 10 - 5};
      const Event b{rng.uniform() * 10 - 5, rng.uniform() * 10 - 5};
      const double v = rng.uniform() * 1.98 - 0.99;
      const double before = interval(a, b);
      const double after = interval(lorentz_transform(a, v), lorentz_transform(b, v));
      worst = std::max(worst, std::abs(after - before) / std::max(1.0, std::abs(before)));
    }
    s.bound("interval", worst, 1e-12);
  });
  s.run("ew-reduction", [&] {
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
      const Event e{rng.uniform() * 10 - 5, rng.uniform() * 10 - 5};
      const double v = rng.uniform() * 1.98 - 0.99;
      const Event l = lorentz_transform(e, v);
      const Event w = edwards_winnie_transform(e, {v, 0.0, 0.0});
      worst = std::max({worst, std::abs(l.t - w.t), std::abs(l.x - w.x)});
    }
    s.bound("ew-reduction", worst, 1e-12);
  });
  s.throws<NoSuchFrame>("timelike-pair", [] { simultaneity_frame({0, 0}, {1, 0.5}); });
  return s.done();
}

std::vector<SuiteResult> run_all(std::uint64_t seed) {
  return {hilbert_suite(seed),  schrodinger_suite(seed), rdm_suite(seed),     beable_suite(seed),
          collapse_suite(seed), protective_suite(seed),  frames_suite(seed)};
}

}  // namespace qrdm::verify
