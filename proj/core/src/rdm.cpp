#include "qrdm/rdm.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "qrdm/errors.hpp"
#include "qrdm/random.hpp"

namespace qrdm {

namespace {

std::vector<double> cumulative(std::span<const double> p) {
  if (p.empty()) throw DimensionMismatch("empty distribution");
  std::vector<double> cdf(p.size());
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0) || !std::isfinite(p[i])) throw NormalizationError("probabilities must be finite and non-negative");
    s += p[i];
    cdf[i] = s;
  }
  if (std::abs(s - 1.0) > kDensityTolerance) throw NormalizationError("probabilities sum to " + std::to_string(s));
  return cdf;
}

std::uint32_t uniform_site(IndexRange r, Rng& rng) {
  const double u = rng.uniform() * static_cast<double>(r.size());
  std::size_t off = static_cast<std::size_t>(u);
  if (off >= r.size()) off = r.size() - 1;
  return static_cast<std::uint32_t>(r.begin + off);
}

}  // namespace

StayTrajectory sample_stays(std::span<const double> probabilities, std::size_t n, std::uint64_t seed,
                            double dt_instant) {
  if (n < 1) throw DomainError("need at least one instant");
  if (!(dt_instant > 0)) throw DomainError("dt_instant must be positive");
  const auto cdf = cumulative(probabilities);
  Rng rng(seed);
  StayTrajectory t;
  t.dt_instant = dt_instant;
  t.seed = seed;
  t.stays.resize(n);
  for (auto& s : t.stays) s = static_cast<std::uint32_t>(rng.pick(cdf));
  return t;
}

StayTrajectory sample_stays(const GridWavefunction& psi, std::size_t n, std::uint64_t seed, double dt_instant) {
  std::vector<double> p(psi.size());
  double total = 0;
  for (std::size_t k = 0; k < psi.size(); ++k) total += (p[k] = std::norm(psi[k]) * psi.dx());
  for (auto& v : p) v /= total;
  return sample_stays(p, n, seed, dt_instant);
}

std::vector<double> empirical_density(const StayTrajectory& t, std::size_t sites, std::size_t bins) {
  if (bins == 0 || sites == 0 || bins > sites) throw DomainError("need 1 <= bins <= sites");
  std::vector<double> h(bins, 0.0);
  if (t.stays.empty()) return h;
  for (auto s : t.stays) {
    if (s >= sites) throw DimensionMismatch("stay index outside the site range");
    h[static_cast<std::size_t>(s) * bins / sites] += 1.0;
  }
  const double inv = 1.0 / static_cast<double>(t.stays.size());
  for (auto& v : h) v *= inv;
  return h;
}

std::vector<double> effective_charge_density(const GridWavefunction& psi, double charge) {
  std::vector<double> q(psi.size());
  for (std::size_t k = 0; k < psi.size(); ++k) q[k] = charge * std::norm(psi[k]);
  return q;
}

PairedStayTrajectory sample_entangled_stays(std::span<const BranchRegions> branches, std::size_t n,
                                            std::uint64_t seed, double dt_instant) {
  if (branches.size() != 2) throw DimensionMismatch("entangled source needs exactly two branches");
  if (n < 1) throw DomainError("need at least one instant");
  const double w = branches[0].weight + branches[1].weight;
  if (branches[0].weight < 0 || branches[1].weight < 0 || std::abs(w - 1.0) > kDensityTolerance)
    throw NormalizationError("branch weights must be non-negative and sum to 1, got " + std::to_string(w));
  for (const auto& b : branches)
    if (b.particle1.size() == 0 || b.particle2.size() == 0) throw DomainError("empty branch region");
  Rng rng(seed);
  PairedStayTrajectory t;
  t.dt_instant = dt_instant;
  t.seed = seed;
  t.stays1.resize(n);
  t.stays2.resize(n);
  t.branches.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t b = rng.uniform() < branches[0].weight ? 0 : 1;
    t.branches[i] = b;
    t.stays1[i] = uniform_site(branches[b].particle1, rng);
    t.stays2[i] = uniform_site(branches[b].particle2, rng);
  }
  return t;
}

GridWavefunction two_box_state(const GridSpec& spec, std::size_t n, IndexRange box1, IndexRange box2, double weight1) {
  if (weight1 < 0 || weight1 > 1) throw DomainError("box weight must lie in [0, 1]");
  if (box1.end > n || box2.end > n || box1.size() == 0 || box2.size() == 0) throw DomainError("box outside grid");
  if (box1.end > box2.begin && box2.end > box1.begin) throw DomainError("boxes overlap");
  std::vector<Complex> s(n, 0.0);
  auto fill = [&](IndexRange box, double weight) {
    double norm = 0;
    std::vector<double> shape(box.size());
    for (std::size_t k = 0; k < box.size(); ++k) {
      shape[k] = std::sin(std::numbers::pi * static_cast<double>(k + 1) / static_cast<double>(box.size() + 1));
      norm += shape[k] * shape[k];
    }
    const double scale = std::sqrt(weight / (norm * spec.dx));
    for (std::size_t k = 0; k < box.size(); ++k) s[box.begin + k] = scale * shape[k];
  };
  fill(box1, weight1);
  fill(box2, 1.0 - weight1);
  return GridWavefunction(spec, std::move(s));
}

}  // namespace qrdm
