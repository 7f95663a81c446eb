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

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qsmooth/model.hpp"
#include "qsmooth/operator.hpp"
#include "qsmooth/record.hpp"
#include "qsmooth/trajectory.hpp"

namespace qsmooth {

/// Retrofiltered effects on the grid t0, ..., T. Entries before T are stored
/// with unit trace; the full effect at grid index k is exp(log_scales[k]) * effects[k].
/// The last entry is the identity with log scale 0.
struct EffectGrid {
  double dt = 0.0;
  double t0 = 0.0;
  std::vector<EffectOperator> effects;
  std::vector<double> log_scales;

  std::size_t size() const noexcept { return effects.size(); }
  double time(std::size_t k) const noexcept { return t0 + dt * static_cast<double>(k); }
  /// Tr[E(t_k) rho], including the stored scale.
  double likelihood(std::size_t k, const DensityMatrix& rho) const {
    return effects[k].expectation(rho) * std::exp(log_scales[k]);
  }
};

/// One backward step E(t) = M_y^dagger[E(t + dt)]
///   = K0(y)^dagger E K0(y) + sum_c c^dagger E c dt.
EffectOperator effect_back_step(const StepOperators& ops, const EffectOperator& next,
                                std::span<const double> y);
EffectOperator effect_back_step(const OpenSystemModel& model, const EffectOperator& next,
                                std::span<const double> y, double dt);

/// Propagates from E(T) = I back to t0 along the observed record.
EffectGrid retrofilter_record(const OpenSystemModel& model, const Record& record_y);

/// Grid of identity effects; smoothing with it reduces to forward weighting.
EffectGrid identity_effects(int dim, std::size_t n_steps, double dt, double t0 = 0.0);

/// Same columnar layout as records: header with dt, t0, T and dim, then one
/// row per grid point with the log scale and the matrix entries in row-major
/// order as (real, imag) pairs.
void write_effect_grid(std::ostream& os, const EffectGrid& grid);
EffectGrid read_effect_grid(std::istream& is);

}  // namespace qsmooth
