#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qrdm/hilbert.hpp"
#include "qrdm/rdm.hpp"
#include "qrdm/schrodinger.hpp"

namespace qrdm {

class PointerState {
 public:
  // Requires width >= 4 dx.
  PointerState(GridWavefunction grid, double center, double width);
  static PointerState gaussian(double center, double width, std::size_t n, double length);

  const GridWavefunction& grid() const noexcept { return grid_; }
  double center() const noexcept { return center_; }
  double width() const noexcept { return width_; }

 private:
  GridWavefunction grid_;
  double center_;
  double width_;
};

enum class CouplingProfile { constant, triangular };

struct ProtectiveSetup {
  ComplexVectorState psi;
  HermitianOperator observable;
  std::size_t projections = 1000;
  double tau = 1.0;
  CouplingProfile profile = CouplingProfile::constant;

  void validate() const;
  double g(double t) const;
  // Coupling weight of sub-step n = 1..N: (tau/N) g(t_n), t_n = n tau / N.
  double step_weight(std::size_t n) const;
};

struct PointerBranch {
  Complex amplitude{};
  double eigenvalue = 0;
  double weight = 0;
  GridWavefunction pointer;
};

std::vector<PointerBranch> unprotected_measurement(const ProtectiveSetup& setup, const PointerState& pointer);

struct ShiftCheckpoint {
  std::size_t step = 0;
  double shift = 0;            // ensemble shift accumulated so far
  double integrated_g = 0;
};

struct ProtectiveRun {
  double pointer_shift = 0;        // post-selected pointer, normalized
  double ensemble_shift = 0;       // unconditional pointer mean
  double expected_shift = 0;       // <A>
  double survival_probability = 1;
  double final_width = 0;
  double width_ratio = 1;
  bool protection_failed = false;
  std::string diagnostics;
  std::vector<ShiftCheckpoint> checkpoints;
  PointerState final_pointer;
};

ProtectiveRun zeno_protective_run(const ProtectiveSetup& setup, const PointerState& pointer);

struct FirstOrderCheck {
  double orthogonal_amplitude = 0;  // norm of the part orthogonal to psi after one sub-step
  double predicted = 0;             // delta ||(A - <A>) psi|| sqrt(<p^2>) / hbar
  double residual = 0;              // |orthogonal - predicted| / predicted, 0 when predicted = 0
};
FirstOrderCheck first_order_branch_check(const ProtectiveSetup& setup, const PointerState& pointer);

double pointer_shift_rate(const ComplexVectorState& psi_t, const HermitianOperator& a, double g_t);
// Composite Simpson integral of the shift rate over [0, tau].
double integrated_pointer_shift(const ProtectiveSetup& setup, std::size_t intervals = 1000);

double measure_density(const GridWavefunction& psi, IndexRange region);
double measure_flux(const GridWavefunction& psi, IndexRange region);

std::vector<IndexRange> uniform_partition(std::size_t samples, std::size_t regions);

struct TomographyResult {
  GridWavefunction reconstructed;
  double l2_error = 0;
  std::vector<double> region_density;
  std::vector<double> region_flux;
  double density_fidelity = 0;  // max |measured - re-derived| region density
  double flux_fidelity = 0;
};
TomographyResult tomography(const GridWavefunction& truth, std::span<const IndexRange> partition);

}  // namespace qrdm
