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

#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qsmooth {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

/// Entrywise tolerance on |A - A^dagger|.
inline constexpr double kHermitianTol = 1e-10;
/// Eigenvalues down to -kPositivityTol are accepted as round-off.
inline constexpr double kPositivityTol = 1e-9;
/// Allowed deviation of Tr[rho] from one for a normalized state.
inline constexpr double kTraceTol = 1e-9;

double hermiticity_error(const ComplexMatrix& m);
double min_eigenvalue(const ComplexMatrix& hermitian);
double trace_real(const ComplexMatrix& m);

/// Returns (A + A^dagger) / 2.
ComplexMatrix hermitize(const ComplexMatrix& m);

/// Clips eigenvalues in [-floor, 0) to zero. Throws PositivityError if any
/// eigenvalue lies below -floor.
ComplexMatrix project_psd(const ComplexMatrix& hermitian, double floor);

/// A positive operator that is either a normalized state or an unnormalized
/// one carrying a likelihood weight in its trace.
class DensityMatrix {
 public:
  /// Validates Hermiticity, positivity and unit trace.
  static DensityMatrix normalized(ComplexMatrix m);
  /// Validates Hermiticity, positivity and strictly positive trace.
  static DensityMatrix unnormalized(ComplexMatrix m);
  static DensityMatrix pure(const StateVector& psi);
  static DensityMatrix maximally_mixed(int dim);

  const ComplexMatrix& matrix() const noexcept { return mat_; }
  int dim() const noexcept { return static_cast<int>(mat_.rows()); }
  bool is_normalized() const noexcept { return normalized_; }
  double trace() const { return trace_real(mat_); }

  /// Divides by the trace; the result is flagged normalized.
  DensityMatrix normalize() const;

 private:
  DensityMatrix(ComplexMatrix m, bool normalized)
      : mat_(std::move(m)), normalized_(normalized) {}

  ComplexMatrix mat_;
  bool normalized_;
};

/// Positive operator with no upper bound; retrofiltered effects live here.
class EffectOperator {
 public:
  static EffectOperator from_matrix(ComplexMatrix m);
  static EffectOperator identity(int dim);

  const ComplexMatrix& matrix() const noexcept { return mat_; }
  int dim() const noexcept { return static_cast<int>(mat_.rows()); }
  double trace() const { return trace_real(mat_); }

  /// Expectation Tr[E rho], clipped at zero.
  double expectation(const DensityMatrix& rho) const;

 private:
  explicit EffectOperator(ComplexMatrix m) : mat_(std::move(m)) {}
  ComplexMatrix mat_;
};

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;
};

/// Tr[rho^2]; rho must be normalized.
double purity(const DensityMatrix& rho);

struct FidelityResult {
  double value;
  /// Set when the reference state is not pure to within 1e-6, in which case
  /// Tr[rho_T rho_C] is no longer the squared-overlap fidelity.
  bool reference_impure;
};

/// Tr[rho_true rho_c], valid as a fidelity when rho_true is pure.
FidelityResult fidelity(const DensityMatrix& rho_true, const DensityMatrix& rho_c);

/// Qubit only. Convention: |1> is the sigma_z = +1 (excited) state, so
/// |1><1| maps to (0, 0, 1).
BlochVector to_bloch(const DensityMatrix& rho);
DensityMatrix from_bloch(const BlochVector& b);

namespace pauli {

// Basis ordering is (|0>, |1>) with |0> the ground state.
ComplexMatrix identity();
ComplexMatrix sigma_x();
ComplexMatrix sigma_y();
ComplexMatrix sigma_z();
/// sigma_minus |1> = |0>.
ComplexMatrix sigma_minus();
ComplexMatrix sigma_plus();
StateVector ground();
StateVector excited();

}  // namespace pauli

}  // namespace qsmooth
