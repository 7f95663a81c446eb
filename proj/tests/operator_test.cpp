// Copyright 2026 The qsmooth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qsmooth/operator.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qsmooth/errors.hpp"

namespace qsmooth {
namespace {

// Random density matrix G G^dagger / Tr with Gaussian G; rank r.
ComplexMatrix random_state_matrix(std::mt19937_64& gen, int d, int rank) {
  std::normal_distribution<double> n;
  ComplexMatrix g(d, rank);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < rank; ++j) g(i, j) = Complex(n(gen), n(gen));
  }
  ComplexMatrix m = g * g.adjoint();
  return m / m.trace().real();
}

DensityMatrix state_from_vector(Complex a, Complex b) {
  StateVector v(2);
  v << a, b;
  return DensityMatrix::pure(v);
}

TEST(Purity, Examples) {
  EXPECT_DOUBLE_EQ(purity(DensityMatrix::pure(pauli::excited())), 1.0);
  EXPECT_DOUBLE_EQ(purity(DensityMatrix::maximally_mixed(2)), 0.5);
  EXPECT_NEAR(purity(from_bloch({0.0, 0.0, 0.5})), 0.625, 1e-15);
}

TEST(Purity, RejectsUnnormalizedState) {
  const auto rho = DensityMatrix::unnormalized(2.0 * ComplexMatrix::Identity(2, 2));
  EXPECT_THROW(purity(rho), ContractViolation);
}

TEST(Fidelity, Examples) {
  const auto one = DensityMatrix::pure(pauli::excited());
  const auto zero = DensityMatrix::pure(pauli::ground());
  EXPECT_DOUBLE_EQ(fidelity(one, one).value, 1.0);
  EXPECT_DOUBLE_EQ(fidelity(one, zero).value, 0.0);
  EXPECT_DOUBLE_EQ(fidelity(one, DensityMatrix::maximally_mixed(2)).value, 0.5);
  EXPECT_FALSE(fidelity(one, zero).reference_impure);
}

TEST(Fidelity, FlagsImpureReference) {
  const auto mixed = DensityMatrix::maximally_mixed(2);
  EXPECT_TRUE(fidelity(mixed, mixed).reference_impure);
}

TEST(Bloch, Examples) {
  const auto z = to_bloch(DensityMatrix::pure(pauli::excited()));
  EXPECT_DOUBLE_EQ(z.x, 0.0);
  EXPECT_DOUBLE_EQ(z.y, 0.0);
  EXPECT_DOUBLE_EQ(z.z, 1.0);
  const auto c = to_bloch(DensityMatrix::maximally_mixed(2));
  EXPECT_DOUBLE_EQ(c.norm(), 0.0);
  const auto x = to_bloch(state_from_vector(1.0, 1.0));
  EXPECT_NEAR(x.x, 1.0, 1e-15);
  EXPECT_NEAR(x.y, 0.0, 1e-15);
  EXPECT_NEAR(x.z, 0.0, 1e-15);
}

TEST(Bloch, AxesMatchPauliExpectations) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto rho = DensityMatrix::normalized(random_state_matrix(gen, 2, 2));
    const auto b = to_bloch(rho);
    EXPECT_NEAR(b.x, (pauli::sigma_x() * rho.matrix()).trace().real(), 1e-14);
    EXPECT_NEAR(b.y, (pauli::sigma_y() * rho.matrix()).trace().real(), 1e-14);
    EXPECT_NEAR(b.z, (pauli::sigma_z() * rho.matrix()).trace().real(), 1e-14);
  }
}

TEST(Bloch, RejectsNonQubitAndOutsideBall) {
  EXPECT_THROW(to_bloch(DensityMatrix::maximally_mixed(3)), DimensionError);
  EXPECT_THROW(from_bloch({1.0, 1.0, 0.0}), ParameterError);
}

TEST(Pauli, Conventions) {
  EXPECT_TRUE((pauli::sigma_z() * pauli::excited()).isApprox(pauli::excited()));
  EXPECT_TRUE((pauli::sigma_minus() * pauli::excited()).isApprox(pauli::ground()));
  EXPECT_TRUE((pauli::sigma_minus() * pauli::ground()).isZero());
  const Complex i(0.0, 1.0);
  EXPECT_TRUE((pauli::sigma_x() * pauli::sigma_y()).isApprox(i * pauli::sigma_z()));
}

TEST(Hermitize, FixedPointAndIdempotent) {
  std::mt19937_64 gen(3);
  const ComplexMatrix h = random_state_matrix(gen, 3, 3);
  EXPECT_TRUE(hermitize(h) == h);
  std::normal_distribution<double> n;
  ComplexMatrix a(3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) a(i, j) = Complex(n(gen), n(gen));
  }
  const ComplexMatrix once = hermitize(a);
  EXPECT_LT(hermiticity_error(once), 1e-15);
  EXPECT_TRUE(hermitize(once).isApprox(once, 1e-15));
}

TEST(ProjectPsd, ClipsRoundOffAndRejectsLargeNegatives) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1e-12;
  const ComplexMatrix p = project_psd(m, kPositivityTol);
  EXPECT_NEAR(p(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(p(1, 1)), 0.0, 1e-15);
  EXPECT_GE(min_eigenvalue(p), 0.0);
  m(1, 1) = -1e-3;
  EXPECT_THROW(project_psd(m, kPositivityTol), PositivityError);
}

TEST(DensityMatrix, Validation) {
  ComplexMatrix not_herm = ComplexMatrix::Identity(2, 2) / 2.0;
  not_herm(0, 1) = 0.1;
  EXPECT_THROW(DensityMatrix::normalized(not_herm), ContractViolation);
  ComplexMatrix negative = ComplexMatrix::Zero(2, 2);
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  EXPECT_THROW(DensityMatrix::normalized(negative), PositivityError);
  EXPECT_THROW(DensityMatrix::normalized(ComplexMatrix::Identity(2, 2)), ContractViolation);
  EXPECT_THROW(DensityMatrix::normalized(ComplexMatrix::Identity(2, 3)), DimensionError);
  EXPECT_THROW(DensityMatrix::unnormalized(ComplexMatrix::Zero(2, 2)), ImpossibleRecordError);
  const auto u = DensityMatrix::unnormalized(3.0 * ComplexMatrix::Identity(2, 2));
  EXPECT_FALSE(u.is_normalized());
  EXPECT_DOUBLE_EQ(u.trace(), 6.0);
  EXPECT_TRUE(u.normalize().is_normalized());
}

TEST(EffectOperator, AllowsLargeTraceButNotNegativity) {
  const auto e = EffectOperator::from_matrix(50.0 * ComplexMatrix::Identity(2, 2));
  EXPECT_DOUBLE_EQ(e.expectation(DensityMatrix::pure(pauli::excited())), 50.0);
  ComplexMatrix negative = ComplexMatrix::Identity(2, 2);
  negative(1, 1) = -1.0;
  EXPECT_THROW(EffectOperator::from_matrix(negative), PositivityError);
}

// Properties over random states of dimension 2..4 and every rank.
TEST(OperatorProperties, PurityBoundsAndFidelityKernel) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const int d = 2 + trial % 3;
    const int rank = 1 + trial % d;
    const auto rho = DensityMatrix::normalized(random_state_matrix(gen, d, rank));
    const double p = purity(rho);
    EXPECT_GE(p, 1.0 / d - 1e-12);
    EXPECT_LE(p, 1.0 + 1e-12);
    EXPECT_NEAR(fidelity(rho, rho).value, p, 1e-14);
  }
}

TEST(OperatorProperties, BlochRoundTrip) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rho = DensityMatrix::normalized(random_state_matrix(gen, 2, 1 + trial % 2));
    const auto back = from_bloch(to_bloch(rho));
    EXPECT_LT((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 1e-14);
    const auto b = to_bloch(rho);
    EXPECT_NEAR(purity(rho), 0.5 * (1.0 + b.norm() * b.norm()), 1e-14);
  }
}

TEST(OperatorProperties, ProjectPsdOutputIsPositive) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(-5e-10, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    ComplexMatrix m = random_state_matrix(gen, 3, 3);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
    Eigen::VectorXd vals(3);
    for (int i = 0; i < 3; ++i) vals[i] = u(gen);
    m = es.eigenvectors() * vals.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    const ComplexMatrix p = project_psd(hermitize(m), kPositivityTol);
    EXPECT_GE(min_eigenvalue(p), -1e-15);
  }
}

}  // namespace
}  // namespace qsmooth
