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

#include "qsmooth/trajectory.hpp"

#include <numbers>
#include <sstream>

#include "qsmooth/errors.hpp"

namespace qsmooth {

namespace {

DensityMatrix sandwich(const ComplexMatrix& k, const DensityMatrix& rho, double scale) {
  ComplexMatrix out = k * rho.matrix() * k.adjoint();
  out *= scale;
  return DensityMatrix::unnormalized(hermitize(out));
}

void check_record_against(const StepOperators& ops, const Record& record, bool need_counts) {
  if (record.n_observed() != ops.n_observed()) {
    throw DimensionError("record has the wrong number of observed channels for this model");
  }
  if (need_counts && record.n_unobserved() != ops.n_unobserved()) {
    throw DimensionError("record has the wrong number of unobserved channels for this model");
  }
}

}  // namespace

StepOperators::StepOperators(const OpenSystemModel& model, double dt) : dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("StepOperators: dt must be positive");
  const int d = model.dim();
  const Complex i(0.0, 1.0);
  const ComplexMatrix generator = i * model.hamiltonian() + 0.5 * model.total_decay();
  const double norm = Eigen::JacobiSVD<ComplexMatrix>(generator * dt).singularValues()(0);
  if (norm >= 0.25) {
    std::ostringstream os;
    os << "dt = " << dt << " too large: ||(iH + L^dagger L / 2) dt|| = " << norm << " >= 0.25";
    throw StepSizeError(os.str());
  }
  drift_ = ComplexMatrix::Identity(d, d) - generator * dt;
  for (const auto& ch : model.observed()) {
    const Complex phase = std::exp(-i * ch.phase);
    measured_.push_back(phase * dt * ch.op);
    ComplexMatrix x = phase * ch.op;
    quadratures_.push_back(x + x.adjoint());
  }
  for (const auto& ch : model.unobserved()) jumps_.push_back(ch.op);
}

ComplexMatrix StepOperators::no_jump(std::span<const double> y) const {
  if (y.size() != measured_.size()) throw DimensionError("no_jump: wrong number of y values");
  ComplexMatrix k = drift_;
  for (std::size_t j = 0; j < y.size(); ++j) k += y[j] * measured_[j];
  return k;
}

DensityMatrix observed_step(const StepOperators& ops, const DensityMatrix& rho,
                            std::span<const double> y) {
  if (rho.dim() != ops.dim()) throw DimensionError("observed_step: dimension mismatch");
  const ComplexMatrix k = ops.no_jump(y);
  ComplexMatrix out = k * rho.matrix() * k.adjoint();
  for (const auto& c : ops.jump_ops()) out += ops.dt() * (c * rho.matrix() * c.adjoint());
  return DensityMatrix::unnormalized(hermitize(out));
}

DensityMatrix kraus_step(const StepOperators& ops, const DensityMatrix& rho,
                         const RecordStep& step, std::span<const double> jump_probs) {
  if (rho.dim() != ops.dim()) throw DimensionError("kraus_step: dimension mismatch");
  if (step.n.size() != ops.n_unobserved() || jump_probs.size() != ops.n_unobserved()) {
    throw DimensionError("kraus_step: wrong number of unobserved outcomes or probabilities");
  }
  const int c = step.jump_channel();
  if (c < 0) {
    double p_none = 1.0;
    for (double p : jump_probs) p_none -= p;
    if (!(p_none > 0.0)) throw StepSizeError("kraus_step: ostensible no-jump probability is zero");
    return sandwich(ops.no_jump(step.y), rho, 1.0 / p_none);
  }
  const double p = jump_probs[static_cast<std::size_t>(c)];
  if (!(p > 0.0)) {
    throw ImpossibleRecordError("kraus_step: jump in a channel with zero ostensible probability");
  }
  ComplexMatrix out = ops.jump_ops()[static_cast<std::size_t>(c)] * rho.matrix() *
                      ops.jump_ops()[static_cast<std::size_t>(c)].adjoint();
  out *= ops.dt() / p;
  if (!(trace_real(out) > 0.0)) {
    throw ImpossibleRecordError("kraus_step: jump out of a state the jump operator annihilates");
  }
  return DensityMatrix::unnormalized(hermitize(out));
}

DensityMatrix kraus_step(const OpenSystemModel& model, const DensityMatrix& rho,
                         const RecordStep& step, double dt, std::span<const double> jump_probs) {
  return kraus_step(StepOperators(model, dt), rho, step, jump_probs);
}

DensityMatrix conditioned_update(const StepOperators& ops, const DensityMatrix& rho,
                                 const RecordStep& step) {
  const int c = step.jump_channel();
  const ComplexMatrix k =
      c < 0 ? ops.no_jump(step.y) : ops.jump_ops()[static_cast<std::size_t>(c)];
  ComplexMatrix out = k * rho.matrix() * k.adjoint();
  if (!(trace_real(out) > 0.0)) {
    throw ImpossibleRecordError("conditioned_update: record has zero probability");
  }
  return DensityMatrix::unnormalized(hermitize(out)).normalize();
}

std::vector<double> ostensible_jump_probabilities(const StepOperators& ops,
                                                  const DensityMatrix& rho_filtered) {
  std::vector<double> p;
  p.reserve(ops.n_unobserved());
  for (const auto& c : ops.jump_ops()) {
    const double rate = (c * rho_filtered.matrix() * c.adjoint()).trace().real();
    p.push_back(std::max(0.0, rate) * ops.dt() / rho_filtered.trace());
  }
  return p;
}

OstensibleDraw sample_ostensible_unobserved_step(const DensityMatrix& rho_filtered,
                                                 const StepOperators& ops, RandomStream& rng) {
  if (!rho_filtered.is_normalized()) {
    throw ContractViolation("sample_ostensible_unobserved_step: context state must be normalized");
  }
  OstensibleDraw draw{std::vector<std::uint8_t>(ops.n_unobserved(), 0),
                      ostensible_jump_probabilities(ops, rho_filtered), 0.0};
  double total = 0.0;
  for (double p : draw.jump_probs) total += p;
  if (!(total >= 0.0 && total <= 0.5)) {
    std::ostringstream os;
    os << "ostensible jump probability " << total << " outside [0, 0.5]; reduce dt";
    throw StepSizeError(os.str());
  }
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t c = 0; c < draw.jump_probs.size(); ++c) {
    acc += draw.jump_probs[c];
    if (u < acc) {
      draw.n[c] = 1;
      draw.probability = draw.jump_probs[c];
      return draw;
    }
  }
  draw.probability = 1.0 - total;
  return draw;
}

RecordStep sample_true_step(const StepOperators& ops, const DensityMatrix& rho_true,
                            RandomStream& rng) {
  RecordStep step;
  step.n.assign(ops.n_unobserved(), 0);
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t c = 0; c < ops.n_unobserved(); ++c) {
    const auto& op = ops.jump_ops()[c];
    acc += std::max(0.0, (op * rho_true.matrix() * op.adjoint()).trace().real()) * ops.dt();
    if (u < acc) {
      step.n[c] = 1;
      break;
    }
  }
  const double noise_scale = 1.0 / std::sqrt(ops.dt());
  step.y.reserve(ops.n_observed());
  for (const auto& x : ops.quadratures()) {
    const double mean = (x * rho_true.matrix()).trace().real();
    step.y.push_back(mean + noise_scale * rng.normal());
  }
  return step;
}

double log_ostensible_density(const Record& record, std::size_t first, std::size_t last) {
  const double dt = record.dt();
  const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi / dt);
  double acc = 0.0;
  for (std::size_t k = first; k < last; ++k) {
    for (double y : record[k].y) acc += log_norm - 0.5 * y * y * dt;
  }
  return acc;
}

TrajectoryGrid filter_forward(const OpenSystemModel& model, const Record& record_y,
                              const DensityMatrix& rho0) {
  const StepOperators ops(model, record_y.dt());
  check_record_against(ops, record_y, false);
  if (rho0.dim() != model.dim()) throw DimensionError("filter_forward: rho0 dimension mismatch");

  TrajectoryGrid grid{record_y.dt(), record_y.t0(), {}, {}};
  grid.states.reserve(record_y.size() + 1);
  grid.log_weights.reserve(record_y.size() + 1);
  grid.states.push_back(rho0.normalize());
  grid.log_weights.push_back(std::log(rho0.trace()));
  for (std::size_t k = 0; k < record_y.size(); ++k) {
    const DensityMatrix next = observed_step(ops, grid.states.back(), record_y[k].y);
    grid.log_weights.push_back(grid.log_weights.back() + std::log(next.trace()));
    grid.states.push_back(next.normalize());
  }
  return grid;
}

TrajectoryGrid filter_forward_joint(const OpenSystemModel& model, const Record& record_y,
                                    const Record& record_n, const DensityMatrix& rho0) {
  return filter_forward_joint(model, record_y, record_n, rho0,
                              filter_forward(model, record_y, rho0));
}

TrajectoryGrid filter_forward_joint(const OpenSystemModel& model, const Record& record_y,
                                    const Record& record_n, const DensityMatrix& rho0,
                                    const TrajectoryGrid& filtered) {
  const StepOperators ops(model, record_y.dt());
  check_record_against(ops, record_y, false);
  if (record_n.n_unobserved() != ops.n_unobserved()) {
    throw DimensionError("filter_forward_joint: count record does not match the model");
  }
  if (record_n.size() != record_y.size() || record_n.dt() != record_y.dt()) {
    throw DimensionError("filter_forward_joint: records are on different grids");
  }
  if (filtered.size() != record_y.size() + 1) {
    throw DimensionError("filter_forward_joint: filtered grid does not match the record");
  }

  TrajectoryGrid grid{record_y.dt(), record_y.t0(), {}, {}};
  grid.states.reserve(record_y.size() + 1);
  grid.log_weights.reserve(record_y.size() + 1);
  grid.states.push_back(rho0.normalize());
  grid.log_weights.push_back(std::log(rho0.trace()));
  for (std::size_t k = 0; k < record_y.size(); ++k) {
    const RecordStep step{record_y[k].y, record_n[k].n};
    const auto probs = ostensible_jump_probabilities(ops, filtered.states[k]);
    const DensityMatrix next = kraus_step(ops, grid.states.back(), step, probs);
    grid.log_weights.push_back(grid.log_weights.back() + std::log(next.trace()));
    grid.states.push_back(next.normalize());
  }
  return grid;
}

TrueTrajectory simulate_true_trajectory(const OpenSystemModel& model, const DensityMatrix& rho0,
                                        std::size_t n_steps, double dt, RandomStream& rng) {
  const StepOperators ops(model, dt);
  TrueTrajectory out{Record(dt, 0.0, ops.n_observed(), ops.n_unobserved()),
                     TrajectoryGrid{dt, 0.0, {}, {}}};
  out.record.reserve(n_steps);
  out.states.states.reserve(n_steps + 1);
  out.states.log_weights.reserve(n_steps + 1);
  out.states.states.push_back(rho0.normalize());
  out.states.log_weights.push_back(0.0);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const DensityMatrix& rho = out.states.states.back();
    RecordStep step = sample_true_step(ops, rho, rng);
    const int c = step.jump_channel();
    const ComplexMatrix op =
        c < 0 ? ops.no_jump(step.y)
              : std::sqrt(dt) * ops.jump_ops()[static_cast<std::size_t>(c)];
    const DensityMatrix next = sandwich(op, rho, 1.0);
    out.states.log_weights.push_back(out.states.log_weights.back() + std::log(next.trace()));
    out.states.states.push_back(next.normalize());
    out.record.push_back(std::move(step));
  }
  return out;
}

}  // namespace qsmooth
