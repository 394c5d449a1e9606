#include "qrdm/hilbert.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "qrdm/errors.hpp"

namespace qrdm {

namespace {

void check_normalized(const ComplexVector& v, const char* what) {
  if (v.size() < 1) throw DimensionMismatch(std::string(what) + ": empty amplitude list");
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i).real()) || !std::isfinite(v(i).imag()))
      throw NormalizationError(std::string(what) + ": non-finite amplitude");
  }
  const double n2 = v.squaredNorm();
  if (std::abs(n2 - 1.0) > kNormTolerance)
    throw NormalizationError(std::string(what) + ": sum |c|^2 = " + std::to_string(n2));
}

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

}  // namespace

ComplexVectorState::ComplexVectorState(ComplexVector amplitudes) : amps_(std::move(amplitudes)) {
  check_normalized(amps_, "state");
}

ComplexVectorState ComplexVectorState::normalized(ComplexVector amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0) || !std::isfinite(n)) throw NormalizationError("state: cannot normalize a zero vector");
  return ComplexVectorState(amplitudes / n);
}

ComplexVectorState ComplexVectorState::basis(int dim, int index) {
  if (dim < 1 || index < 0 || index >= dim) throw DimensionMismatch("basis index out of range");
  ComplexVector v = ComplexVector::Zero(dim);
  v(index) = 1.0;
  return ComplexVectorState(std::move(v));
}

ComplexVectorState ComplexVectorState::from(std::initializer_list<Complex> amplitudes) {
  ComplexVector v(static_cast<Eigen::Index>(amplitudes.size()));
  Eigen::Index i = 0;
  for (const auto& a : amplitudes) v(i++) = a;
  return ComplexVectorState(std::move(v));
}

Complex ComplexVectorState::inner(const ComplexVectorState& other) const {
  if (other.dim() != dim()) throw DimensionMismatch("inner product of states with different dims");
  return amps_.dot(other.amps_);
}

HermitianOperator::HermitianOperator(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() < 1 || matrix_.rows() != matrix_.cols())
    throw DimensionMismatch("operator must be square and non-empty");
  const double dev = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (!(dev <= kHermitianTolerance)) throw DomainError("operator is not Hermitian, deviation " + std::to_string(dev));
}

HermitianOperator HermitianOperator::diagonal(std::span<const double> values) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(values.size()),
                                        static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = values[i];
  return HermitianOperator(std::move(m));
}

HermitianOperator HermitianOperator::projector(const ComplexVectorState& state) {
  ComplexMatrix m = state.amplitudes() * state.amplitudes().adjoint();
  m = 0.5 * (m + m.adjoint()).eval();
  return HermitianOperator(std::move(m));
}

Spectrum HermitianOperator::spectrum() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(matrix_);
  if (solver.info() != Eigen::Success) throw NumericError("eigensolver", "Hermitian eigendecomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

EnergySuperposition::EnergySuperposition(std::vector<EnergyBranch> branches, UnitMode mode)
    : branches_(std::move(branches)), mode_(mode) {
  if (branches_.empty()) throw DimensionMismatch("energy superposition needs at least one branch");
  double n2 = 0;
  for (const auto& b : branches_) {
    if (!std::isfinite(b.energy)) throw DomainError("branch energy is not finite");
    n2 += std::norm(b.amplitude);
  }
  if (std::abs(n2 - 1.0) > kNormTolerance)
    throw NormalizationError("energy superposition: sum |c|^2 = " + std::to_string(n2));
}

EnergySuperposition::EnergySuperposition(std::span<const double> energies, std::span<const Complex> amplitudes,
                                         UnitMode mode)
    : EnergySuperposition(
          [&] {
            if (energies.size() != amplitudes.size())
              throw DimensionMismatch("energies and amplitudes differ in length");
            std::vector<EnergyBranch> b;
            for (std::size_t i = 0; i < energies.size(); ++i) b.push_back({energies[i], amplitudes[i]});
            return b;
          }(),
          mode) {}

EnergySuperposition EnergySuperposition::from_probabilities(std::span<const double> energies,
                                                            std::span<const double> probabilities, UnitMode mode) {
  if (energies.size() != probabilities.size()) throw DimensionMismatch("energies and probabilities differ in length");
  std::vector<EnergyBranch> b;
  for (std::size_t i = 0; i < energies.size(); ++i) {
    if (probabilities[i] < 0) throw NormalizationError("negative probability");
    b.push_back({energies[i], Complex(std::sqrt(probabilities[i]), 0.0)});
  }
  return EnergySuperposition(std::move(b), mode);
}

std::vector<double> EnergySuperposition::probabilities() const {
  std::vector<double> p;
  p.reserve(branches_.size());
  for (const auto& b : branches_) p.push_back(std::norm(b.amplitude));
  return p;
}

double EnergySuperposition::mean_energy() const {
  double e = 0;
  for (const auto& b : branches_) e += std::norm(b.amplitude) * b.energy;
  return e;
}

CompositeState::CompositeState(std::vector<int> factor_dims, ComplexVector amplitudes)
    : dims_(std::move(factor_dims)), amps_(std::move(amplitudes)) {
  if (dims_.empty()) throw DimensionMismatch("composite state needs at least one factor");
  long total = 1;
  for (int d : dims_) {
    if (d < 1) throw DimensionMismatch("factor dimension must be positive");
    total *= d;
  }
  if (total != amps_.size()) throw DimensionMismatch("amplitude count does not match factor dimensions");
  check_normalized(amps_, "composite state");
}

CompositeState CompositeState::product(std::span<const ComplexVectorState> factors) {
  if (factors.empty()) throw DimensionMismatch("product of no factors");
  std::vector<int> dims;
  ComplexVector v = ComplexVector::Ones(1);
  for (const auto& f : factors) {
    dims.push_back(f.dim());
    ComplexVector next(v.size() * f.dim());
    for (Eigen::Index i = 0; i < v.size(); ++i)
      for (int j = 0; j < f.dim(); ++j) next(i * f.dim() + j) = v(i) * f[j];
    v = std::move(next);
  }
  v /= v.norm();
  return CompositeState(std::move(dims), std::move(v));
}

Complex CompositeState::at(std::span<const int> index) const {
  if (index.size() != dims_.size()) throw DimensionMismatch("multi-index rank mismatch");
  Eigen::Index flat = 0;
  for (std::size_t f = 0; f < dims_.size(); ++f) {
    if (index[f] < 0 || index[f] >= dims_[f]) throw DimensionMismatch("multi-index out of range");
    flat = flat * dims_[f] + index[f];
  }
  return amps_(flat);
}

std::vector<double> born_probabilities(const ComplexVectorState& state) {
  std::vector<double> p(static_cast<std::size_t>(state.dim()));
  for (int i = 0; i < state.dim(); ++i) p[static_cast<std::size_t>(i)] = std::norm(state[i]);
  return p;
}

std::vector<double> born_probabilities(const ComplexVector& amplitudes) {
  check_normalized(amplitudes, "born probabilities");
  return born_probabilities(ComplexVectorState(amplitudes));
}

double expectation_value(const ComplexVectorState& state, const HermitianOperator& op) {
  if (state.dim() != op.dim()) throw DimensionMismatch("state and operator dims differ");
  const Complex v = state.amplitudes().dot(op.matrix() * state.amplitudes());
  const double scale = std::max(1.0, op.matrix().cwiseAbs().maxCoeff());
  if (std::abs(v.imag()) > 1e-12 * scale)
    throw NumericError("expectation", "imaginary residue " + std::to_string(v.imag()));
  return v.real();
}

double energy_uncertainty(const EnergySuperposition& s) {
  const double mean = s.mean_energy();
  double var = 0;
  for (const auto& b : s.branches()) var += std::norm(b.amplitude) * (b.energy - mean) * (b.energy - mean);
  return std::sqrt(std::max(var, 0.0));
}

std::array<ComplexVector, 4> pbr_measurement_basis() {
  const double r = kInvSqrt2;
  ComplexVector zero(2), one(2), plus(2), minus(2);
  zero << 1.0, 0.0;
  one << 0.0, 1.0;
  plus << r, r;
  minus << r, -r;
  auto kron = [](const ComplexVector& a, const ComplexVector& b) {
    ComplexVector out(4);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out(2 * i + j) = a(i) * b(j);
    return out;
  };
  return {
      ((kron(zero, one) + kron(one, zero)) * r).eval(),
      ((kron(zero, minus) + kron(one, plus)) * r).eval(),
      ((kron(plus, one) + kron(minus, zero)) * r).eval(),
      ((kron(plus, minus) + kron(minus, plus)) * r).eval(),
  };
}

PbrTable pbr_orthogonality_table() {
  const auto phi = pbr_measurement_basis();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const double target = a == b ? 1.0 : 0.0;
      if (std::abs(phi[a].dot(phi[b]) - target) > 1e-12)
        throw NumericError("pbr", "measurement basis is not orthonormal");
    }
  const double r = kInvSqrt2;
  ComplexVector zero(2), plus(2);
  zero << 1.0, 0.0;
  plus << r, r;
  const std::array<const ComplexVector*, 2> single{&zero, &plus};
  PbrTable table{};
  for (int j = 0; j < 4; ++j) {
    ComplexVector prod(4);
    const ComplexVector& a = *single[j / 2];
    const ComplexVector& b = *single[j % 2];
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) prod(2 * x + y) = a(x) * b(y);
    for (int k = 0; k < 4; ++k) table[j][k] = std::norm(phi[k].dot(prod));
  }
  return table;
}

HardyReport hardy_unitary_check() {
  ComplexMatrix u(2, 2);
  u << 1.0, 0.0, 0.0, -1.0;
  ComplexVector psi1(2), psi2(2);
  psi1 << 1.0, 0.0;
  psi2 << 0.0, 1.0;
  const ComplexVector sum = (psi1 + psi2) * kInvSqrt2;
  const ComplexVector diff = (psi1 - psi2) * kInvSqrt2;
  HardyReport r;
  r.invariant_deviation = (u * psi1 - psi1).norm();
  r.flip_deviation = (u * sum - diff).norm();
  r.overlap = std::abs(sum.dot(diff));
  r.passed = r.invariant_deviation < 1e-12 && r.flip_deviation < 1e-12 && r.overlap < 1e-12;
  return r;
}

}  // namespace qrdm
