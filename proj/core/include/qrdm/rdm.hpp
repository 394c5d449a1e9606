#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qrdm/schrodinger.hpp"

namespace qrdm {

struct StayTrajectory {
  std::vector<std::uint32_t> stays;
  double dt_instant = 1.0;
  std::uint64_t seed = 0;

  std::size_t instants() const noexcept { return stays.size(); }
};

struct PairedStayTrajectory {
  std::vector<std::uint32_t> stays1;
  std::vector<std::uint32_t> stays2;
  std::vector<std::uint8_t> branches;  // 0 = u, 1 = d
  double dt_instant = 1.0;
  std::uint64_t seed = 0;

  std::size_t instants() const noexcept { return stays1.size(); }
};

// Half-open index range [begin, end).
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
};

struct BranchRegions {
  double weight = 0;
  IndexRange particle1;
  IndexRange particle2;
};

inline constexpr double kDensityTolerance = 1e-10;

StayTrajectory sample_stays(std::span<const double> probabilities, std::size_t n, std::uint64_t seed,
                            double dt_instant = 1.0);
// Bins rho dx onto the grid sites.
StayTrajectory sample_stays(const GridWavefunction& psi, std::size_t n, std::uint64_t seed,
                            double dt_instant = 1.0);

// Fraction of instants per bin; sites are split into `bins` equal contiguous groups.
std::vector<double> empirical_density(const StayTrajectory& t, std::size_t sites, std::size_t bins);

std::vector<double> effective_charge_density(const GridWavefunction& psi, double charge);

PairedStayTrajectory sample_entangled_stays(std::span<const BranchRegions> branches, std::size_t n,
                                            std::uint64_t seed, double dt_instant = 1.0);

// Two disjoint boxes carrying ground-state sine profiles with weights |a|^2 and 1 - |a|^2.
GridWavefunction two_box_state(const GridSpec& spec, std::size_t n, IndexRange box1, IndexRange box2,
                               double weight1);

}  // namespace qrdm
