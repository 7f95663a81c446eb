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

#include "qsmooth/model.hpp"

#include <cmath>

#include "qsmooth/errors.hpp"

namespace qsmooth {

namespace {

void check_dim(const ComplexMatrix& m, int dim, const char* what) {
  if (m.rows() != dim || m.cols() != dim) {
    throw DimensionError(std::string("OpenSystemModel: ") + what +
                         " does not match the Hamiltonian dimension");
  }
}

}  // namespace

OpenSystemModel::OpenSystemModel(ComplexMatrix hamiltonian, std::vector<HomodyneChannel> observed,
                                 std::vector<JumpChannel> unobserved)
    : hamiltonian_(std::move(hamiltonian)),
      observed_(std::move(observed)),
      unobserved_(std::move(unobserved)) {
  if (hamiltonian_.rows() != hamiltonian_.cols() || hamiltonian_.rows() < 2) {
    throw DimensionError("OpenSystemModel: Hamiltonian must be square with dim >= 2");
  }
  if (hermiticity_error(hamiltonian_) > kHermitianTol) {
    throw ParameterError("OpenSystemModel: Hamiltonian is not Hermitian");
  }
  for (const auto& ch : observed_) {
    check_dim(ch.op, dim(), "observed channel");
    if (!std::isfinite(ch.phase)) throw ParameterError("OpenSystemModel: non-finite phase");
  }
  for (const auto& ch : unobserved_) check_dim(ch.op, dim(), "unobserved channel");
}

ComplexMatrix OpenSystemModel::total_decay() const {
  ComplexMatrix sum = ComplexMatrix::Zero(dim(), dim());
  for (const auto& ch : observed_) sum += ch.op.adjoint() * ch.op;
  for (const auto& ch : unobserved_) sum += ch.op.adjoint() * ch.op;
  return sum;
}

OpenSystemModel two_level_atom(double omega, double gamma, double eta, double phi) {
  if (!(gamma > 0.0)) throw ParameterError("two_level_atom: gamma must be positive");
  if (!(eta >= 0.0 && eta <= 1.0)) throw ParameterError("two_level_atom: eta must lie in [0, 1]");
  if (!std::isfinite(omega) || !std::isfinite(phi)) {
    throw ParameterError("two_level_atom: omega and phi must be finite");
  }
  const ComplexMatrix sm = pauli::sigma_minus();
  return OpenSystemModel(0.5 * omega * pauli::sigma_x(),
                         {HomodyneChannel{std::sqrt(gamma * eta) * sm, phi}},
                         {JumpChannel{std::sqrt(gamma * (1.0 - eta)) * sm}});
}

ComplexMatrix lindblad_generator(const OpenSystemModel& model, const DensityMatrix& rho) {
  if (rho.dim() != model.dim()) throw DimensionError("lindblad_generator: dimension mismatch");
  const ComplexMatrix& r = rho.matrix();
  const ComplexMatrix& h = model.hamiltonian();
  const Complex i(0.0, 1.0);
  ComplexMatrix out = -i * (h * r - r * h);
  auto dissipate = [&](const ComplexMatrix& l) {
    const ComplexMatrix ldl = l.adjoint() * l;
    out += l * r * l.adjoint() - 0.5 * (ldl * r + r * ldl);
  };
  for (const auto& ch : model.observed()) dissipate(ch.op);
  for (const auto& ch : model.unobserved()) dissipate(ch.op);
  return out;
}

}  // namespace qsmooth
