#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qrdm {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kHermitianTolerance = 1e-12;

class ComplexVectorState {
 public:
  // Throws NormalizationError unless sum |c_i|^2 = 1 within kNormTolerance.
  explicit ComplexVectorState(ComplexVector amplitudes);

  static ComplexVectorState normalized(ComplexVector amplitudes);
  static ComplexVectorState basis(int dim, int index);
  static ComplexVectorState from(std::initializer_list<Complex> amplitudes);

  int dim() const noexcept { return static_cast<int>(amps_.size()); }
  const ComplexVector& amplitudes() const noexcept { return amps_; }
  Complex operator[](int i) const { return amps_(i); }
  Complex inner(const ComplexVectorState& other) const;

 private:
  ComplexVector amps_;
};

struct Spectrum {
  Eigen::VectorXd values;  // ascending
  ComplexMatrix vectors;   // columns
};

class HermitianOperator {
 public:
  explicit HermitianOperator(ComplexMatrix matrix);

  static HermitianOperator diagonal(std::span<const double> values);
  static HermitianOperator projector(const ComplexVectorState& state);

  int dim() const noexcept { return static_cast<int>(matrix_.rows()); }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Spectrum spectrum() const;

 private:
  ComplexMatrix matrix_;
};

enum class UnitMode { natural, physical_ev };

struct EnergyBranch {
  double energy = 0;
  Complex amplitude{};
};

class EnergySuperposition {
 public:
  explicit EnergySuperposition(std::vector<EnergyBranch> branches, UnitMode mode = UnitMode::natural);
  EnergySuperposition(std::span<const double> energies, std::span<const Complex> amplitudes,
                      UnitMode mode = UnitMode::natural);
  // Amplitudes sqrt(P_i) with zero phase.
  static EnergySuperposition from_probabilities(std::span<const double> energies,
                                                std::span<const double> probabilities,
                                                UnitMode mode = UnitMode::natural);

  std::size_t size() const noexcept { return branches_.size(); }
  const std::vector<EnergyBranch>& branches() const noexcept { return branches_; }
  const EnergyBranch& operator[](std::size_t i) const { return branches_[i]; }
  UnitMode unit_mode() const noexcept { return mode_; }
  std::vector<double> probabilities() const;
  double mean_energy() const;

 private:
  std::vector<EnergyBranch> branches_;
  UnitMode mode_;
};

class CompositeState {
 public:
  CompositeState(std::vector<int> factor_dims, ComplexVector amplitudes);
  static CompositeState product(std::span<const ComplexVectorState> factors);

  const std::vector<int>& factor_dims() const noexcept { return dims_; }
  const ComplexVector& amplitudes() const noexcept { return amps_; }
  // Row-major multi-index: the last factor varies fastest.
  Complex at(std::span<const int> index) const;

 private:
  std::vector<int> dims_;
  ComplexVector amps_;
};

std::vector<double> born_probabilities(const ComplexVectorState& state);
// Validates the raw amplitudes before squaring.
std::vector<double> born_probabilities(const ComplexVector& amplitudes);
double expectation_value(const ComplexVectorState& state, const HermitianOperator& op);
double energy_uncertainty(const EnergySuperposition& s);

// rows: product states |00>, |0+>, |+0>, |++>; columns: outcomes phi_1..phi_4.
using PbrTable = std::array<std::array<double, 4>, 4>;
PbrTable pbr_orthogonality_table();
std::array<ComplexVector, 4> pbr_measurement_basis();

struct HardyReport {
  double invariant_deviation = 0;   // |U psi1 - psi1|
  double flip_deviation = 0;        // |U (psi1+psi2)/sqrt2 - (psi1-psi2)/sqrt2|
  double overlap = 0;               // |<(psi1+psi2)|(psi1-psi2)>| / 2
  bool passed = false;
};
HardyReport hardy_unitary_check();

}  // namespace qrdm
