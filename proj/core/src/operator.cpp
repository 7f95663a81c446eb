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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qsmooth/errors.hpp"

namespace qsmooth {

namespace {

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 2) {
    std::ostringstream os;
    os << what << ": expected a square matrix of dimension >= 2, got " << m.rows() << "x"
       << m.cols();
    throw DimensionError(os.str());
  }
}

void require_positive(const ComplexMatrix& m, const char* what) {
  const double herm = hermiticity_error(m);
  if (herm > kHermitianTol) {
    std::ostringstream os;
    os << what << ": not Hermitian (max |A - A^dagger| = " << herm << ")";
    throw ContractViolation(os.str());
  }
  const double lo = min_eigenvalue(m);
  if (lo < -kPositivityTol) {
    std::ostringstream os;
    os << what << ": negative eigenvalue " << lo;
    throw PositivityError(os.str(), lo);
  }
}

}  // namespace

double hermiticity_error(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const ComplexMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double trace_real(const ComplexMatrix& m) { return m.trace().real(); }

ComplexMatrix hermitize(const ComplexMatrix& m) {
  require_square(m, "hermitize");
  return 0.5 * (m + m.adjoint());
}

ComplexMatrix project_psd(const ComplexMatrix& hermitian, double floor) {
  require_square(hermitian, "project_psd");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(hermitian));
  Eigen::VectorXd values = es.eigenvalues();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] < -floor) {
      std::ostringstream os;
      os << "project_psd: eigenvalue " << values[i] << " below -" << floor;
      throw PositivityError(os.str(), values[i]);
    }
    values[i] = std::max(values[i], 0.0);
  }
  const ComplexMatrix& v = es.eigenvectors();
  return v * values.cast<Complex>().asDiagonal() * v.adjoint();
}

DensityMatrix DensityMatrix::normalized(ComplexMatrix m) {
  require_square(m, "DensityMatrix");
  require_positive(m, "DensityMatrix");
  const double tr = trace_real(m);
  if (std::abs(tr - 1.0) > kTraceTol) {
    std::ostringstream os;
    os << "DensityMatrix: normalized state has trace " << tr;
    throw ContractViolation(os.str());
  }
  return DensityMatrix(std::move(m), true);
}

DensityMatrix DensityMatrix::unnormalized(ComplexMatrix m) {
  require_square(m, "DensityMatrix");
  require_positive(m, "DensityMatrix");
  const double tr = trace_real(m);
  if (!(tr > 0.0) || !std::isfinite(tr)) {
    std::ostringstream os;
    os << "DensityMatrix: unnormalized state needs a finite positive trace, got " << tr;
    throw ImpossibleRecordError(os.str());
  }
  return DensityMatrix(std::move(m), false);
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  const double n = psi.squaredNorm();
  if (!(n > 0.0)) throw ParameterError("DensityMatrix::pure: zero state vector");
  ComplexMatrix m = psi * psi.adjoint() / n;
  return normalized(hermitize(m));
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  if (dim < 2) throw DimensionError("maximally_mixed: dim must be >= 2");
  return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim), true);
}

DensityMatrix DensityMatrix::normalize() const {
  const double tr = trace();
  if (!(tr > 0.0)) throw ImpossibleRecordError("DensityMatrix::normalize: non-positive trace");
  return DensityMatrix(mat_ / tr, true);
}

EffectOperator EffectOperator::from_matrix(ComplexMatrix m) {
  require_square(m, "EffectOperator");
  require_positive(m, "EffectOperator");
  return EffectOperator(std::move(m));
}

EffectOperator EffectOperator::identity(int dim) {
  if (dim < 2) throw DimensionError("EffectOperator::identity: dim must be >= 2");
  return EffectOperator(ComplexMatrix::Identity(dim, dim));
}

double EffectOperator::expectation(const DensityMatrix& rho) const {
  if (rho.dim() != dim()) throw DimensionError("EffectOperator::expectation: dimension mismatch");
  return std::max(0.0, (mat_ * rho.matrix()).trace().real());
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

double purity(const DensityMatrix& rho) {
  if (!rho.is_normalized()) throw ContractViolation("purity: state is not normalized");
  // Tr[rho^2] = sum |rho_ij|^2 for Hermitian rho.
  return rho.matrix().squaredNorm();
}

FidelityResult fidelity(const DensityMatrix& rho_true, const DensityMatrix& rho_c) {
  if (!rho_true.is_normalized() || !rho_c.is_normalized()) {
    throw ContractViolation("fidelity: both states must be normalized");
  }
  if (rho_true.dim() != rho_c.dim()) throw DimensionError("fidelity: dimension mismatch");
  const double value = (rho_true.matrix() * rho_c.matrix()).trace().real();
  return {value, purity(rho_true) < 1.0 - 1e-6};
}

BlochVector to_bloch(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw DimensionError("to_bloch: qubit states only");
  if (!rho.is_normalized()) throw ContractViolation("to_bloch: state is not normalized");
  const ComplexMatrix& m = rho.matrix();
  // With ordering (|0>, |1>): x = 2 Re rho_01, y = 2 Im rho_01, z = rho_11 - rho_00.
  return {2.0 * m(0, 1).real(), 2.0 * m(0, 1).imag(), m(1, 1).real() - m(0, 0).real()};
}

DensityMatrix from_bloch(const BlochVector& b) {
  if (b.norm() > 1.0 + 1e-9) throw ParameterError("from_bloch: Bloch vector outside the unit ball");
  ComplexMatrix m = 0.5 * (pauli::identity() + b.x * pauli::sigma_x() + b.y * pauli::sigma_y() +
                           b.z * pauli::sigma_z());
  return DensityMatrix::normalized(std::move(m));
}

namespace pauli {

ComplexMatrix identity() { return ComplexMatrix::Identity(2, 2); }

ComplexMatrix sigma_x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

ComplexMatrix sigma_y() {
  const Complex i(0.0, 1.0);
  ComplexMatrix m(2, 2);
  m << 0.0, i, -i, 0.0;
  return m;
}

ComplexMatrix sigma_z() {
  ComplexMatrix m(2, 2);
  m << -1.0, 0.0, 0.0, 1.0;
  return m;
}

ComplexMatrix sigma_minus() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

ComplexMatrix sigma_plus() { return sigma_minus().adjoint(); }

StateVector ground() {
  StateVector v(2);
  v << 1.0, 0.0;
  return v;
}

StateVector excited() {
  StateVector v(2);
  v << 0.0, 1.0;
  return v;
}

}  // namespace pauli

}  // namespace qsmooth
