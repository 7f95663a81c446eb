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

// Test-only reference computations. Everything here is built from the model
// fields directly and propagates state vectors over explicitly enumerated
// jump patterns, so it shares no code path with the density-matrix filters.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "qsmooth/model.hpp"

namespace qsmooth::oracle {

using Cvec = Eigen::VectorXcd;
using Cmat = Eigen::MatrixXcd;

struct SingleChannelKraus {
  Cmat drift;     // I - (iH + sum L^dagger L / 2) dt
  Cmat measured;  // exp(-i phi) dt b
  Cmat jump;      // sqrt(dt) c
  double dt;

  SingleChannelKraus(const OpenSystemModel& model, double dt_) : dt(dt_) {
    const int d = model.dim();
    const std::complex<double> i(0.0, 1.0);
    Cmat decay = Cmat::Zero(d, d);
    for (const auto& ch : model.observed()) decay += ch.op.adjoint() * ch.op;
    for (const auto& ch : model.unobserved()) decay += ch.op.adjoint() * ch.op;
    drift = Cmat::Identity(d, d) - (i * model.hamiltonian() + 0.5 * decay) * dt;
    const auto& b = model.observed().at(0);
    measured = std::exp(-i * b.phase) * dt * b.op;
    jump = std::sqrt(dt) * model.unobserved().at(0).op;
  }

  Cmat op(double y, bool jumped) const { return jumped ? jump : Cmat(drift + y * measured); }
};

inline double log_gaussian_ost(double y, double dt) {
  return -0.5 * std::log(2.0 * std::numbers::pi / dt) - 0.5 * y * y * dt;
}

/// Actual joint density of observed values ys[first, last) and the jump
/// pattern bits (bit i = jump in step first + i), starting from psi.
inline double joint_density(const SingleChannelKraus& k, const std::vector<double>& ys,
                            std::size_t first, std::size_t last, std::uint64_t pattern,
                            const Cvec& psi) {
  Cvec v = psi;
  double log_ost = 0.0;
  for (std::size_t s = first; s < last; ++s) {
    const bool jumped = (pattern >> (s - first)) & 1U;
    v = k.op(ys[s], jumped) * v;
    log_ost += log_gaussian_ost(ys[s], k.dt);
  }
  return std::exp(log_ost) * v.squaredNorm();
}

/// Marginal density of ys[first, last) from psi, summing over every pattern.
inline double marginal_density(const SingleChannelKraus& k, const std::vector<double>& ys,
                               std::size_t first, std::size_t last, const Cvec& psi) {
  double total = 0.0;
  const std::uint64_t n = std::uint64_t{1} << (last - first);
  for (std::uint64_t p = 0; p < n; ++p) total += joint_density(k, ys, first, last, p, psi);
  return total;
}

/// State vector after applying the pattern over ys[0, j).
inline Cvec propagate(const SingleChannelKraus& k, const std::vector<double>& ys, std::size_t j,
                      std::uint64_t pattern, const Cvec& psi) {
  Cvec v = psi;
  for (std::size_t s = 0; s < j; ++s) v = k.op(ys[s], (pattern >> s) & 1U) * v;
  return v;
}

/// Exact posterior over past patterns (bits for steps [0, j)) given every
/// observed value, by summing the joint density over all future patterns.
inline std::vector<double> past_pattern_posterior(const SingleChannelKraus& k,
                                                  const std::vector<double>& ys, std::size_t j,
                                                  const Cvec& psi) {
  const std::uint64_t n_past = std::uint64_t{1} << j;
  std::vector<double> post(n_past);
  double total = 0.0;
  for (std::uint64_t p = 0; p < n_past; ++p) {
    const Cvec v = propagate(k, ys, j, p, psi);
    double log_ost = 0.0;
    for (std::size_t s = 0; s < j; ++s) log_ost += log_gaussian_ost(ys[s], k.dt);
    const double past = std::exp(log_ost);
    // Future marginal from the (unnormalized) propagated vector.
    post[p] = past * marginal_density(k, ys, j, ys.size(), v);
    total += post[p];
  }
  for (double& v : post) v /= total;
  return post;
}

}  // namespace qsmooth::oracle
