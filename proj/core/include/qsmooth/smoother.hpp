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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qsmooth/model.hpp"
#include "qsmooth/operator.hpp"
#include "qsmooth/record.hpp"
#include "qsmooth/retrofilter.hpp"
#include "qsmooth/trajectory.hpp"

namespace qsmooth {

struct SmoothingOptions {
  /// Number of ostensibly sampled unobserved records.
  std::size_t ensemble_size = 10000;
  /// Root seed and stream counter; sample i draws from
  /// RandomStream(seed, stream, i).
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  /// Threads used for the sample chunks. The result does not depend on it.
  std::size_t workers = 1;
  /// Grid points with ess below this fraction of the ensemble size are counted
  /// in SmoothedTrajectory::low_ess_steps.
  double ess_warning_fraction = 0.01;
};

/// Samples per reduction chunk. Fixed so that the floating-point reduction
/// order is the same for any worker count.
inline constexpr std::size_t kSmootherChunk = 256;

struct SmoothedTrajectory {
  double dt = 0.0;
  double t0 = 0.0;
  std::size_t ensemble_size = 0;
  std::vector<DensityMatrix> states;
  /// (sum w)^2 / sum w^2 at each grid point.
  std::vector<double> ess;
  /// Monte Carlo standard error of each matrix entry (self-normalized
  /// importance sampling, delta method).
  std::vector<Eigen::MatrixXd> standard_errors;
  std::size_t low_ess_steps = 0;

  std::size_t size() const noexcept { return states.size(); }
  double time(std::size_t k) const noexcept { return t0 + dt * static_cast<double>(k); }
};

/// Smoothed state rho_S(t) = sum_k w_k(t) rho_k(t) / sum_k w_k(t) over an
/// ensemble of unobserved records drawn from the filtered-rate ostensible
/// distribution, where rho_k is the state conditioned on the observed record
/// and sample k, and w_k(t) = Tr[E(t) rho~_k(t)] with rho~_k carrying its
/// forward likelihood ratio. rho0 must be pure.
SmoothedTrajectory smooth(const OpenSystemModel& model, const Record& record_y,
                          const DensityMatrix& rho0, const SmoothingOptions& options);

/// Same, reusing a precomputed filter and retrofilter for the record.
SmoothedTrajectory smooth(const OpenSystemModel& model, const Record& record_y,
                          const DensityMatrix& rho0, const TrajectoryGrid& filtered,
                          const EffectGrid& effects, const SmoothingOptions& options);

/// Ensemble average of the doubly conditioned states weighted by their
/// forward likelihood ratio only. Converges to the filtered state.
SmoothedTrajectory forward_weighted_average(const OpenSystemModel& model, const Record& record_y,
                                            const DensityMatrix& rho0,
                                            const TrajectoryGrid& filtered,
                                            const SmoothingOptions& options);

/// One explicitly stored ensemble member.
struct EnsembleMember {
  Record counts;
  TrajectoryGrid trajectory;
  /// log w_k(t) at each grid point; -inf once the record became impossible.
  std::vector<double> log_weights;
  /// log p_ost of the whole count record.
  double log_ostensible_probability = 0.0;
};

struct SmoothingEnsemble {
  double dt = 0.0;
  double t0 = 0.0;
  std::vector<EnsembleMember> members;

  std::size_t size() const noexcept { return members.size(); }
};

/// Draws `ensemble_size` count records with the same streams smooth() uses
/// and stores every member. Memory is O(M x steps); meant for small runs.
SmoothingEnsemble build_ensemble(const OpenSystemModel& model, const Record& record_y,
                                 const DensityMatrix& rho0, const SmoothingOptions& options);

/// Builds an ensemble from given count records (e.g. an exhaustive list).
SmoothingEnsemble build_ensemble(const OpenSystemModel& model, const Record& record_y,
                                 const DensityMatrix& rho0, std::span<const Record> count_records);

/// Self-normalized importance weights of the members at grid index k. With
/// members drawn from p_ost they represent p(past counts | all y).
std::vector<double> smoothed_record_weights(const SmoothingEnsemble& ensemble, std::size_t k);

SmoothedTrajectory smooth_ensemble(const SmoothingEnsemble& ensemble,
                                   double ess_warning_fraction = 0.01);

}  // namespace qsmooth
