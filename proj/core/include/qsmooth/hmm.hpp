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
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace qsmooth::hmm {

/// Emission over a finite alphabet: probabilities(symbol, state).
struct DiscreteEmission {
  Eigen::MatrixXd probabilities;
};

/// Gaussian emission with a state-dependent mean and shared variance. The
/// density is used directly as the likelihood weight.
struct GaussianEmission {
  Eigen::VectorXd means;
  double variance = 1.0;
};

using Emission = std::variant<DiscreteEmission, GaussianEmission>;

/// Finite-state hidden Markov model. Per step, state x emits r and then
/// moves to x' with probability transition(x', x) (columns sum to one).
class ClassicalModel {
 public:
  ClassicalModel(Eigen::MatrixXd transition, Emission emission);

  std::size_t n_states() const noexcept { return static_cast<std::size_t>(transition_.rows()); }
  const Eigen::MatrixXd& transition() const noexcept { return transition_; }
  const Emission& emission() const noexcept { return emission_; }

  /// Likelihood of observation r in each state. Discrete observations are
  /// passed as integral symbol indices.
  Eigen::VectorXd likelihoods(double r) const;

 private:
  Eigen::MatrixXd transition_;
  Emission emission_;
};

/// Probability vector, optionally unnormalized (sum carries a weight).
struct ClassicalState {
  Eigen::VectorXd probs;
  bool normalized = true;

  double total() const { return probs.sum(); }
};

/// Filtered distributions at grid points 0..n: entry k is conditioned on
/// observations [0, k).
std::vector<ClassicalState> hmm_filter(const ClassicalModel& model,
                                       const std::vector<double>& record,
                                       const Eigen::VectorXd& prior);

/// Unnormalized retrofiltered likelihoods at grid points 0..n: entry k is
/// proportional to p(observations [k, n) | x_k), started from a uniform final
/// condition. Each entry is rescaled to sum to one.
std::vector<ClassicalState> hmm_retrofilter(const ClassicalModel& model,
                                            const std::vector<double>& record);

/// p_S(x_k) proportional to p~_R(x_k) p~_F(x_k).
std::vector<ClassicalState> hmm_smooth(const ClassicalModel& model,
                                       const std::vector<double>& record,
                                       const Eigen::VectorXd& prior);

/// Shannon entropy in nats.
double entropy(const ClassicalState& state);

}  // namespace qsmooth::hmm
