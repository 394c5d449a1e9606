#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qrdm/errors.hpp"
#include "qrdm/hilbert.hpp"

using namespace qrdm;

namespace {

ComplexVectorState random_state(int d, std::mt19937_64& g) {
  std::normal_distribution<double> n;
  ComplexVector v(d);
  for (int i = 0; i < d; ++i) v(i) = Complex(n(g), n(g));
  return ComplexVectorState::normalized(v);
}

}  // namespace

TEST(State, RejectsUnnormalizedAmplitudes) {
  EXPECT_THROW(ComplexVectorState::from({1.0, 1.0}), NormalizationError);
  EXPECT_THROW(ComplexVectorState(ComplexVector(0)), DimensionMismatch);
  ComplexVector bad(2);
  bad << std::nan(""), 0.0;
  EXPECT_THROW(ComplexVectorState{bad}, NormalizationError);
}

TEST(State, ToleranceBoundary) {
  const double s = std::sqrt(0.5 + 0.4e-10);
  EXPECT_NO_THROW(ComplexVectorState::from({s, s}));
  const double t = std::sqrt(0.5 + 0.6e-10);
  EXPECT_THROW(ComplexVectorState::from({t, t}), NormalizationError);
}

TEST(Born, BasisStateIsDeterministic) {
  const auto p = born_probabilities(ComplexVectorState::basis(4, 2));
  EXPECT_EQ(p, (std::vector<double>{0, 0, 1, 0}));
}

TEST(Born, EqualSuperposition) {
  const double r = 1 / std::sqrt(2.0);
  const auto p = born_probabilities(ComplexVectorState::from({r, Complex(0, r)}));
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_NEAR(p[1], 0.5, 1e-15);
}

TEST(Born, RandomStatesSumToOne) {
  std::mt19937_64 g(7);
  for (int i = 0; i < 1000; ++i) {
    const auto p = born_probabilities(random_state(1 + i % 16, g));
    double s = 0;
    for (double v : p) {
      EXPECT_GE(v, 0.0);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Born, RawAmplitudeOverloadValidates) {
  ComplexVector v(2);
  v << 0.6, 0.6;
  EXPECT_THROW(born_probabilities(v), NormalizationError);
}

TEST(Operator, RejectsNonHermitian) {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 0.0, 0.0;
  EXPECT_THROW(HermitianOperator{m}, DomainError);
  EXPECT_THROW(HermitianOperator{ComplexMatrix(2, 3)}, DimensionMismatch);
}

TEST(Operator, ExpectationMatchesSpectralSum) {
  std::mt19937_64 g(3);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 5;
    ComplexMatrix m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = Complex(n(g), n(g));
    const HermitianOperator a(0.5 * (m + m.adjoint()));
    const auto psi = random_state(d, g);
    const auto sp = a.spectrum();
    double spectral = 0;
    for (int k = 0; k < d; ++k) spectral += sp.values(k) * std::norm(sp.vectors.col(k).dot(psi.amplitudes()));
    EXPECT_NEAR(expectation_value(psi, a), spectral, 1e-12);
  }
}

TEST(Operator, ExpectationOfProjector) {
  const double r = 1 / std::sqrt(2.0);
  const auto plus = ComplexVectorState::from({r, r});
  const std::vector<double> diag{1.0, 0.0};
  EXPECT_NEAR(expectation_value(plus, HermitianOperator::diagonal(diag)), 0.5, 1e-15);
  EXPECT_NEAR(expectation_value(plus, HermitianOperator::projector(plus)), 1.0, 1e-15);
  EXPECT_THROW(expectation_value(ComplexVectorState::basis(3, 0), HermitianOperator::diagonal(diag)), DimensionMismatch);
}

TEST(Energy, UncertaintyOfTwoLevels) {
  const std::vector<double> e{0.0, 2.0};
  const std::vector<double> p{0.5, 0.5};
  EXPECT_NEAR(energy_uncertainty(EnergySuperposition::from_probabilities(e, p)), 1.0, 1e-15);
  const std::vector<double> q{0.3, 0.7};
  EXPECT_NEAR(energy_uncertainty(EnergySuperposition::from_probabilities(e, q)), 2.0 * std::sqrt(0.21), 1e-14);
}

TEST(Energy, RejectsMismatchedInputs) {
  const std::vector<double> e{0.0, 1.0, 2.0};
  const std::vector<double> p{0.5, 0.5};
  EXPECT_THROW(EnergySuperposition::from_probabilities(e, p), DimensionMismatch);
  const std::vector<double> q{0.5, 0.4, 0.0};
  EXPECT_THROW(EnergySuperposition::from_probabilities(e, q), NormalizationError);
}

TEST(Composite, ProductAmplitudesFactorize) {
  std::mt19937_64 g(11);
  const std::vector<ComplexVectorState> f{random_state(2, g), random_state(3, g), random_state(2, g)};
  const auto c = CompositeState::product(f);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 3; ++b)
      for (int d = 0; d < 2; ++d) {
        const std::vector<int> idx{a, b, d};
        EXPECT_NEAR(std::abs(c.at(idx) - f[0][a] * f[1][b] * f[2][d]), 0.0, 1e-14);
      }
}

TEST(Composite, RejectsBadShapes) {
  ComplexVector v = ComplexVector::Zero(5);
  v(0) = 1.0;
  EXPECT_THROW((CompositeState{{2, 2}, v}), DimensionMismatch);
}

TEST(Pbr, MeasurementBasisIsOrthonormal) {
  const auto phi = pbr_measurement_basis();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) EXPECT_NEAR(std::abs(phi[a].dot(phi[b])), a == b ? 1.0 : 0.0, 1e-14);
}

TEST(Pbr, TableZeroPatternAndRowSums) {
  const auto t = pbr_orthogonality_table();
  for (int j = 0; j < 4; ++j) {
    double row = 0;
    for (int k = 0; k < 4; ++k) {
      row += t[j][k];
      if (j == k)
        EXPECT_LT(t[j][k], 1e-12);
      else
        EXPECT_GT(t[j][k], 0.1);
    }
    EXPECT_NEAR(row, 1.0, 1e-12);
  }
}

TEST(Pbr, IndependentOverlapComputation) {
  // Explicit component vectors for |00>, |0+>, |+0>, |++> and phi_1..phi_4.
  const double h = 0.5, r = 1 / std::sqrt(2.0);
  const std::array<std::array<double, 4>, 4> prod{{{1, 0, 0, 0}, {r, r, 0, 0}, {r, 0, r, 0}, {h, h, h, h}}};
  const std::array<std::array<double, 4>, 4> phi{{{0, r, r, 0}, {h, -h, h, h}, {h, h, -h, h}, {r, 0, 0, -r}}};
  const auto t = pbr_orthogonality_table();
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) {
      double o = 0;
      for (int i = 0; i < 4; ++i) o += prod[j][i] * phi[k][i];
      EXPECT_NEAR(t[j][k], o * o, 1e-12) << j << "," << k;
    }
}

TEST(Hardy, UnitaryChecksPass) {
  const auto r = hardy_unitary_check();
  EXPECT_TRUE(r.passed);
  EXPECT_LT(r.invariant_deviation, 1e-12);
  EXPECT_LT(r.flip_deviation, 1e-12);
  EXPECT_LT(r.overlap, 1e-12);
}
