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

#include <vector>

#include "qsmooth/operator.hpp"

namespace qsmooth {

/// Diffusive channel monitored by homodyne detection. Detection efficiency
/// is folded into the magnitude of `op`.
struct HomodyneChannel {
  ComplexMatrix op;
  double phase = 0.0;  // local-oscillator phase
};

/// Channel whose photon counts are not seen by the observer.
struct JumpChannel {
  ComplexMatrix op;
};

class OpenSystemModel {
 public:
  OpenSystemModel(ComplexMatrix hamiltonian, std::vector<HomodyneChannel> observed,
                  std::vector<JumpChannel> unobserved);

  int dim() const noexcept { return static_cast<int>(hamiltonian_.rows()); }
  const ComplexMatrix& hamiltonian() const noexcept { return hamiltonian_; }
  const std::vector<HomodyneChannel>& observed() const noexcept { return observed_; }
  const std::vector<JumpChannel>& unobserved() const noexcept { return unobserved_; }

  /// Sum of L^dagger L over every channel, observed and unobserved.
  ComplexMatrix total_decay() const;

 private:
  ComplexMatrix hamiltonian_;
  std::vector<HomodyneChannel> observed_;
  std::vector<JumpChannel> unobserved_;
};

/// Resonantly driven two-level atom: H = (omega/2) sigma_x, observed
/// homodyne channel sqrt(gamma eta) sigma_-, unobserved counting channel
/// sqrt(gamma (1 - eta)) sigma_-.
OpenSystemModel two_level_atom(double omega, double gamma, double eta, double phi);

/// Unconditional master-equation generator
///   L[rho] = -i[H, rho] + sum_k (L_k rho L_k^dagger - {L_k^dagger L_k, rho}/2).
ComplexMatrix lindblad_generator(const OpenSystemModel& model, const DensityMatrix& rho);

}  // namespace qsmooth
