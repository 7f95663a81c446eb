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

#include "qsmooth/smoother.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qsmooth/errors.hpp"
#include "qsmooth/parallel.hpp"
#include "qsmooth/rng.hpp"

namespace qsmooth {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Streaming self-normalized weighted sum at one grid point. Weights are kept
// relative to exp(ref), the largest weight seen so far, so that products of
// thousands of likelihood factors never overflow or underflow.
template <int D>
struct Accumulator {
  using Mat = Eigen::Matrix<Complex, D, D>;
  using RealMat = Eigen::Matrix<double, D, D>;

  double ref = kNegInf;
  double sum_w = 0.0;
  double sum_w2 = 0.0;
  Mat sum_rho;
  Mat sum_w2_rho;
  RealMat sum_w2_abs2;

  explicit Accumulator(int d)
      : sum_rho(Mat::Zero(d, d)), sum_w2_rho(Mat::Zero(d, d)), sum_w2_abs2(RealMat::Zero(d, d)) {}

  void scale(double f) {
    const double f2 = f * f;
    sum_w *= f;
    sum_w2 *= f2;
    sum_rho *= f;
    sum_w2_rho *= f2;
    sum_w2_abs2 *= f2;
  }

  // Adds weight q * exp(log_scale) for state rho.
  void add(double log_scale, double q, const Mat& rho) {
    if (!(q > 0.0) || log_scale == kNegInf) return;
    double e = 1.0;
    if (ref == kNegInf) {
      ref = log_scale + std::log(q);
    } else {
      const double x = log_scale - ref;
      if (x > 600.0) {
        const double new_ref = log_scale + std::log(q);
        scale(std::exp(ref - new_ref));
        ref = new_ref;
      } else {
        e = q * std::exp(x);
        if (e > 1.0) {
          scale(1.0 / e);
          ref += std::log(e);
          e = 1.0;
        }
      }
    }
    const double e2 = e * e;
    sum_w += e;
    sum_w2 += e2;
    sum_rho += e * rho;
    sum_w2_rho += e2 * rho;
    sum_w2_abs2 += e2 * rho.cwiseAbs2();
  }

  void merge(const Accumulator& o) {
    if (o.ref == kNegInf) return;
    if (ref == kNegInf) {
      *this = o;
      return;
    }
    Accumulator other = o;
    if (other.ref > ref) {
      scale(std::exp(ref - other.ref));
      ref = other.ref;
    } else {
      other.scale(std::exp(other.ref - ref));
    }
    sum_w += other.sum_w;
    sum_w2 += other.sum_w2;
    sum_rho += other.sum_rho;
    sum_w2_rho += other.sum_w2_rho;
    sum_w2_abs2 += other.sum_w2_abs2;
  }
};

template <int D>
using AccumulatorRow = std::vector<Accumulator<D>>;

template <int D>
SmoothedTrajectory finalize(const std::vector<Accumulator<D>>& acc, double dt, double t0,
                            std::size_t ensemble_size, double ess_warning_fraction) {
  SmoothedTrajectory out;
  out.dt = dt;
  out.t0 = t0;
  out.ensemble_size = ensemble_size;
  out.states.reserve(acc.size());
  out.ess.reserve(acc.size());
  out.standard_errors.reserve(acc.size());
  const double ess_floor = ess_warning_fraction * static_cast<double>(ensemble_size);
  for (std::size_t k = 0; k < acc.size(); ++k) {
    const auto& a = acc[k];
    const double time = t0 + dt * static_cast<double>(k);
    if (a.ref == kNegInf || !(a.sum_w > 0.0)) {
      std::ostringstream os;
      os << "all ensemble weights vanish at step " << k << " (t = " << time << ")";
      throw DegenerateEnsembleError(os.str(), k, time);
    }
    ComplexMatrix mean = a.sum_rho / a.sum_w;
    out.states.push_back(DensityMatrix::normalized(hermitize(mean)));

    const double ess = a.sum_w * a.sum_w / a.sum_w2;
    out.ess.push_back(ess);
    if (ess < ess_floor) ++out.low_ess_steps;

    const int d = static_cast<int>(mean.rows());
    Eigen::MatrixXd se(d, d);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) {
        const Complex m = mean(r, c);
        const double var = a.sum_w2_abs2(r, c) -
                           2.0 * (std::conj(m) * a.sum_w2_rho(r, c)).real() +
                           std::norm(m) * a.sum_w2;
        se(r, c) = std::sqrt(std::max(0.0, var)) / a.sum_w;
      }
    }
    out.standard_errors.push_back(std::move(se));
  }
  return out;
}

template <int D>
void tree_reduce(std::vector<AccumulatorRow<D>>& chunks) {
  for (std::size_t stride = 1; stride < chunks.size(); stride *= 2) {
    for (std::size_t i = 0; i + stride < chunks.size(); i += 2 * stride) {
      auto& dst = chunks[i];
      const auto& src = chunks[i + stride];
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k].merge(src[k]);
    }
  }
}

StateVector pure_state_vector(const DensityMatrix& rho0) {
  const DensityMatrix rho = rho0.normalize();
  if (purity(rho) < 1.0 - 1e-9) throw ContractViolation("smooth: initial state must be pure");
  // For rho = psi psi^dagger every column is psi scaled by a conjugate
  // amplitude; take the column with the largest diagonal entry.
  Eigen::Index j = 0;
  rho.matrix().diagonal().real().maxCoeff(&j);
  return rho.matrix().col(j) / std::sqrt(rho.matrix()(j, j).real());
}

// Per-record tables shared by every sample.
template <int D>
struct PreparedRecord {
  using Mat = Eigen::Matrix<Complex, D, D>;
  using Vec = Eigen::Matrix<Complex, D, 1>;

  int dim = 0;
  std::size_t steps = 0;
  std::size_t channels = 0;
  std::vector<Mat> no_jump;            // K0(y_k)
  std::vector<double> log_no_jump;     // -log(1 - sum_c p_kc)
  std::vector<double> cumulative;      // running sum of p_kc, steps x channels
  std::vector<double> log_jump;        // log(dt / p_kc)
  std::vector<Mat> jump_ops;
  std::vector<Mat> effects;            // unit-trace E(t_k)
  Vec psi0;

  PreparedRecord(const StepOperators& ops, const Record& record_y, const TrajectoryGrid& filtered,
                 const EffectGrid& effect_grid, const StateVector& psi)
      : dim(ops.dim()), steps(record_y.size()), channels(ops.n_unobserved()) {
    no_jump.reserve(steps);
    log_no_jump.reserve(steps);
    cumulative.reserve(steps * channels);
    log_jump.reserve(steps * channels);
    for (std::size_t k = 0; k < steps; ++k) {
      no_jump.push_back(ops.no_jump(record_y[k].y));
      const auto probs = ostensible_jump_probabilities(ops, filtered.states[k]);
      double acc = 0.0;
      for (double p : probs) {
        acc += p;
        cumulative.push_back(acc);
        log_jump.push_back(p > 0.0 ? std::log(ops.dt() / p) : kNegInf);
      }
      if (!(acc >= 0.0 && acc <= 0.5)) {
        std::ostringstream os;
        os << "ostensible jump probability " << acc << " at step " << k
           << " outside [0, 0.5]; reduce dt";
        throw StepSizeError(os.str());
      }
      log_no_jump.push_back(-std::log1p(-acc));
    }
    for (const auto& c : ops.jump_ops()) jump_ops.push_back(c);
    effects.reserve(effect_grid.size());
    for (const auto& e : effect_grid.effects) effects.push_back(e.matrix());
    psi0 = psi;
  }

  static double expectation(const Mat& e, const Vec& psi) {
    return std::max(0.0, psi.dot(e * psi).real());
  }

  void run_sample(std::uint64_t seed, std::uint64_t stream, std::uint64_t index,
                  AccumulatorRow<D>& acc) const {
    RandomStream rng(seed, stream, index);
    Vec psi = psi0;
    Vec next(dim);
    Mat rho(dim, dim);
    double log_scale = 0.0;
    rho.noalias() = psi * psi.adjoint();
    acc[0].add(log_scale, expectation(effects[0], psi), rho);
    for (std::size_t k = 0; k < steps; ++k) {
      const double u = rng.uniform();
      std::size_t fired = channels;
      for (std::size_t c = 0; c < channels; ++c) {
        if (u < cumulative[k * channels + c]) {
          fired = c;
          break;
        }
      }
      if (fired == channels) {
        next.noalias() = no_jump[k] * psi;
        log_scale += log_no_jump[k];
      } else {
        next.noalias() = jump_ops[fired] * psi;
        log_scale += log_jump[k * channels + fired];
      }
      const double n2 = next.squaredNorm();
      // A sampled jump out of a dark state: zero weight from here on.
      if (!(n2 > 0.0)) return;
      log_scale += std::log(n2);
      psi = next / std::sqrt(n2);
      rho.noalias() = psi * psi.adjoint();
      acc[k + 1].add(log_scale, expectation(effects[k + 1], psi), rho);
    }
  }
};

template <int D>
SmoothedTrajectory run_smoother(const StepOperators& ops, const Record& record_y,
                                const TrajectoryGrid& filtered, const EffectGrid& effects,
                                const StateVector& psi0, const SmoothingOptions& options) {
  const PreparedRecord<D> prepared(ops, record_y, filtered, effects, psi0);
  const std::size_t m = options.ensemble_size;
  const std::size_t n_chunks = (m + kSmootherChunk - 1) / kSmootherChunk;
  const std::size_t grid = record_y.size() + 1;
  std::vector<AccumulatorRow<D>> chunks(n_chunks);
  parallel_for(
      n_chunks,
      [&](std::size_t chunk) {
        AccumulatorRow<D> acc(grid, Accumulator<D>(ops.dim()));
        const std::size_t first = chunk * kSmootherChunk;
        const std::size_t last = std::min(m, first + kSmootherChunk);
        for (std::size_t s = first; s < last; ++s) {
          prepared.run_sample(options.seed, options.stream, s, acc);
        }
        chunks[chunk] = std::move(acc);
      },
      options.workers);
  tree_reduce(chunks);
  return finalize(chunks.front(), record_y.dt(), record_y.t0(), m, options.ess_warning_fraction);
}

void check_inputs(const OpenSystemModel& model, const Record& record_y, const DensityMatrix& rho0,
                  const TrajectoryGrid& filtered, const EffectGrid& effects,
                  const SmoothingOptions& options) {
  if (options.ensemble_size < 1) throw ParameterError("smooth: ensemble size must be >= 1");
  if (rho0.dim() != model.dim()) throw DimensionError("smooth: rho0 dimension mismatch");
  if (filtered.size() != record_y.size() + 1 || effects.size() != record_y.size() + 1) {
    throw DimensionError("smooth: filter or effect grid does not match the record");
  }
}

}  // namespace

SmoothedTrajectory smooth(const OpenSystemModel& model, const Record& record_y,
                          const DensityMatrix& rho0, const SmoothingOptions& options) {
  const TrajectoryGrid filtered = filter_forward(model, record_y, rho0);
  const EffectGrid effects = retrofilter_record(model, record_y);
  return smooth(model, record_y, rho0, filtered, effects, options);
}

SmoothedTrajectory smooth(const OpenSystemModel& model, const Record& record_y,
                          const DensityMatrix& rho0, const TrajectoryGrid& filtered,
                          const EffectGrid& effects, const SmoothingOptions& options) {
  check_inputs(model, record_y, rho0, filtered, effects, options);
  const StepOperators ops(model, record_y.dt());
  const StateVector psi0 = pure_state_vector(rho0);
  if (model.dim() == 2) return run_smoother<2>(ops, record_y, filtered, effects, psi0, options);
  return run_smoother<Eigen::Dynamic>(ops, record_y, filtered, effects, psi0, options);
}

SmoothedTrajectory forward_weighted_average(const OpenSystemModel& model, const Record& record_y,
                                            const DensityMatrix& rho0,
                                            const TrajectoryGrid& filtered,
                                            const SmoothingOptions& options) {
  return smooth(model, record_y, rho0, filtered,
                identity_effects(model.dim(), record_y.size(), record_y.dt(), record_y.t0()),
                options);
}

namespace {

EnsembleMember propagate_member(const StepOperators& ops, const Record& record_y, Record counts,
                                const DensityMatrix& rho0, const TrajectoryGrid& filtered,
                                const EffectGrid& effects) {
  EnsembleMember member{std::move(counts), TrajectoryGrid{record_y.dt(), record_y.t0(), {}, {}},
                        {}, 0.0};
  auto& traj = member.trajectory;
  const std::size_t n = record_y.size();
  traj.states.reserve(n + 1);
  traj.log_weights.reserve(n + 1);
  traj.states.push_back(rho0.normalize());
  traj.log_weights.push_back(std::log(rho0.trace()));
  bool alive = true;
  for (std::size_t k = 0; k < n; ++k) {
    const auto probs = ostensible_jump_probabilities(ops, filtered.states[k]);
    const RecordStep step{record_y[k].y, member.counts[k].n};
    const int c = step.jump_channel();
    double p_outcome = 1.0;
    if (c < 0) {
      for (double p : probs) p_outcome -= p;
    } else {
      p_outcome = probs[static_cast<std::size_t>(c)];
    }
    member.log_ostensible_probability += std::log(p_outcome);
    if (alive) {
      try {
        const DensityMatrix next = kraus_step(ops, traj.states.back(), step, probs);
        traj.log_weights.push_back(traj.log_weights.back() + std::log(next.trace()));
        traj.states.push_back(next.normalize());
        continue;
      } catch (const ImpossibleRecordError&) {
        alive = false;
      }
    }
    traj.log_weights.push_back(kNegInf);
    traj.states.push_back(traj.states.back());
  }
  member.log_weights.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double q = effects.effects[k].expectation(traj.states[k]);
    member.log_weights[k] = (traj.log_weights[k] == kNegInf || !(q > 0.0))
                                ? kNegInf
                                : traj.log_weights[k] + std::log(q) + effects.log_scales[k];
  }
  return member;
}

}  // namespace

SmoothingEnsemble build_ensemble(const OpenSystemModel& model, const Record& record_y,
                                 const DensityMatrix& rho0, const SmoothingOptions& options) {
  const StepOperators ops(model, record_y.dt());
  const TrajectoryGrid filtered = filter_forward(model, record_y, rho0);
  std::vector<Record> records;
  records.reserve(options.ensemble_size);
  for (std::size_t s = 0; s < options.ensemble_size; ++s) {
    RandomStream rng(options.seed, options.stream, s);
    Record counts(record_y.dt(), record_y.t0(), 0, ops.n_unobserved());
    counts.reserve(record_y.size());
    for (std::size_t k = 0; k < record_y.size(); ++k) {
      auto draw = sample_ostensible_unobserved_step(filtered.states[k], ops, rng);
      counts.push_back(RecordStep{{}, std::move(draw.n)});
    }
    records.push_back(std::move(counts));
  }
  return build_ensemble(model, record_y, rho0, records);
}

SmoothingEnsemble build_ensemble(const OpenSystemModel& model, const Record& record_y,
                                 const DensityMatrix& rho0, std::span<const Record> count_records) {
  const StepOperators ops(model, record_y.dt());
  const TrajectoryGrid filtered = filter_forward(model, record_y, rho0);
  const EffectGrid effects = retrofilter_record(model, record_y);
  SmoothingEnsemble ensemble{record_y.dt(), record_y.t0(), {}};
  ensemble.members.reserve(count_records.size());
  for (const auto& counts : count_records) {
    if (counts.size() != record_y.size() || counts.n_unobserved() != ops.n_unobserved()) {
      throw DimensionError("build_ensemble: count record does not match the observed record");
    }
    ensemble.members.push_back(
        propagate_member(ops, record_y, counts, rho0, filtered, effects));
  }
  return ensemble;
}

std::vector<double> smoothed_record_weights(const SmoothingEnsemble& ensemble, std::size_t k) {
  if (ensemble.members.empty()) throw ParameterError("smoothed_record_weights: empty ensemble");
  double top = kNegInf;
  for (const auto& m : ensemble.members) {
    if (k >= m.log_weights.size()) throw DimensionError("smoothed_record_weights: step out of range");
    top = std::max(top, m.log_weights[k]);
  }
  const double time = ensemble.t0 + ensemble.dt * static_cast<double>(k);
  if (top == kNegInf) {
    throw DegenerateEnsembleError("smoothed_record_weights: all weights vanish", k, time);
  }
  std::vector<double> w;
  w.reserve(ensemble.size());
  double total = 0.0;
  for (const auto& m : ensemble.members) {
    w.push_back(std::exp(m.log_weights[k] - top));
    total += w.back();
  }
  for (double& v : w) v /= total;
  return w;
}

SmoothedTrajectory smooth_ensemble(const SmoothingEnsemble& ensemble, double ess_warning_fraction) {
  if (ensemble.members.empty()) throw ParameterError("smooth_ensemble: empty ensemble");
  const std::size_t grid = ensemble.members.front().log_weights.size();
  const int d = ensemble.members.front().trajectory.states.front().dim();
  std::vector<Accumulator<Eigen::Dynamic>> acc(grid, Accumulator<Eigen::Dynamic>(d));
  for (const auto& m : ensemble.members) {
    for (std::size_t k = 0; k < grid; ++k) {
      acc[k].add(m.log_weights[k], 1.0, m.trajectory.states[k].matrix());
    }
  }
  return finalize(acc, ensemble.dt, ensemble.t0, ensemble.size(), ess_warning_fraction);
}

}  // namespace qsmooth
