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
#include <span>
#include <vector>

#include "qsmooth/model.hpp"
#include "qsmooth/operator.hpp"
#include "qsmooth/record.hpp"
#include "qsmooth/rng.hpp"

namespace qsmooth {

/// Operators entering one Euler step of the linear (ostensible) trajectory
/// equations for a fixed model and dt.
///
/// No-jump operator:  K0(y) = I - (iH + sum_k L_k^dagger L_k / 2) dt
///                            + sum_j exp(-i phi_j) y_j dt b_j
/// Jump in channel c: sqrt(dt) c
///
/// Homodyne values are ostensibly Normal(0, 1/dt) per channel. The
/// Y-only operation is M_y[rho] = K0 rho K0^dagger + sum_c c rho c^dagger dt,
/// whose ostensible average is rho + L[rho] dt + O(dt^2).
class StepOperators {
 public:
  /// Throws StepSizeError when ||(iH + sum L^dagger L / 2) dt|| >= 0.25.
  StepOperators(const OpenSystemModel& model, double dt);

  double dt() const noexcept { return dt_; }
  int dim() const noexcept { return static_cast<int>(drift_.rows()); }
  std::size_t n_observed() const noexcept { return measured_.size(); }
  std::size_t n_unobserved() const noexcept { return jumps_.size(); }

  const ComplexMatrix& drift() const noexcept { return drift_; }
  ComplexMatrix no_jump(std::span<const double> y) const;
  const std::vector<ComplexMatrix>& jump_ops() const noexcept { return jumps_; }
  /// exp(-i phi) b + exp(i phi) b^dagger for each observed channel.
  const std::vector<ComplexMatrix>& quadratures() const noexcept { return quadratures_; }

 private:
  double dt_;
  ComplexMatrix drift_;
  std::vector<ComplexMatrix> measured_;  // exp(-i phi_j) dt b_j
  std::vector<ComplexMatrix> jumps_;
  std::vector<ComplexMatrix> quadratures_;
};

/// Y-only measurement operation M_y with the unobserved channels averaged.
/// Returns the unnormalized state.
DensityMatrix observed_step(const StepOperators& ops, const DensityMatrix& rho,
                            std::span<const double> y);

/// Joint operation M_{n,y} for the ostensible jump distribution
/// `jump_probs` (one probability per unobserved channel):
///   no jump:      K0(y) rho K0(y)^dagger / (1 - sum_c p_c)
///   jump in c:    c rho c^dagger dt / p_c
/// so that sum_n p_ost(n) M_{n,y} = M_y. The output trace is the ratio of
/// actual to ostensible probability of this step's outcome.
DensityMatrix kraus_step(const StepOperators& ops, const DensityMatrix& rho,
                         const RecordStep& step, std::span<const double> jump_probs);
DensityMatrix kraus_step(const OpenSystemModel& model, const DensityMatrix& rho,
                         const RecordStep& step, double dt, std::span<const double> jump_probs);

/// Normalized conditioned update used for the true state: K0 or the jump
/// operator applied without any ostensible reweighting.
DensityMatrix conditioned_update(const StepOperators& ops, const DensityMatrix& rho,
                                 const RecordStep& step);

/// p_c = Tr[c rho_F c^dagger] dt for every unobserved channel.
std::vector<double> ostensible_jump_probabilities(const StepOperators& ops,
                                                  const DensityMatrix& rho_filtered);

struct OstensibleDraw {
  std::vector<std::uint8_t> n;
  std::vector<double> jump_probs;
  double probability;  // ostensible probability of the drawn outcome
};

/// Draws n_t from the filtered-rate ostensible distribution. Throws
/// StepSizeError if the total jump probability leaves [0, 0.5].
OstensibleDraw sample_ostensible_unobserved_step(const DensityMatrix& rho_filtered,
                                                 const StepOperators& ops, RandomStream& rng);

/// Samples the actual outcome of one step: a jump in channel c with
/// probability Tr[c rho c^dagger] dt, and y_j = <x_j> + dW_j / dt with
/// dW_j ~ Normal(0, dt).
RecordStep sample_true_step(const StepOperators& ops, const DensityMatrix& rho_true,
                            RandomStream& rng);

/// log of the ostensible density of the y values of steps [first, last).
double log_ostensible_density(const Record& record, std::size_t first, std::size_t last);

/// Normalized states on the grid t0, t0 + dt, ..., together with the log of
/// the accumulated trace of the unnormalized state (the forward likelihood
/// ratio of the record up to each grid time).
struct TrajectoryGrid {
  double dt = 0.0;
  double t0 = 0.0;
  std::vector<DensityMatrix> states;
  std::vector<double> log_weights;

  std::size_t size() const noexcept { return states.size(); }
  double time(std::size_t k) const noexcept { return t0 + dt * static_cast<double>(k); }
  double weight(std::size_t k) const { return std::exp(log_weights[k]); }
};

/// Filters on the observed record alone.
TrajectoryGrid filter_forward(const OpenSystemModel& model, const Record& record_y,
                              const DensityMatrix& rho0);

/// Conditions on the observed values of `record_y` and the counts of
/// `record_n`. The ostensible jump probabilities come from the Y-only
/// filtered states, computed here or supplied in `filtered`.
TrajectoryGrid filter_forward_joint(const OpenSystemModel& model, const Record& record_y,
                                    const Record& record_n, const DensityMatrix& rho0);
TrajectoryGrid filter_forward_joint(const OpenSystemModel& model, const Record& record_y,
                                    const Record& record_n, const DensityMatrix& rho0,
                                    const TrajectoryGrid& filtered);

struct TrueTrajectory {
  Record record;        // both y and the true n
  TrajectoryGrid states;  // rho_T on the grid
};

/// Generates a true record and the doubly conditioned true state.
TrueTrajectory simulate_true_trajectory(const OpenSystemModel& model, const DensityMatrix& rho0,
                                        std::size_t n_steps, double dt, RandomStream& rng);

}  // namespace qsmooth
