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

#include "qsmooth/experiment.hpp"

#include <algorithm>
#include <cmath>

#include "qsmooth/errors.hpp"
#include "qsmooth/hmm.hpp"
#include "qsmooth/parallel.hpp"
#include "qsmooth/retrofilter.hpp"
#include "qsmooth/rng.hpp"
#include "qsmooth/smoother.hpp"
#include "qsmooth/trajectory.hpp"

namespace qsmooth {

namespace {

double max_entry(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

MeanEstimate mean_estimate(const std::vector<double>& values) {
  MeanEstimate out;
  const auto n = static_cast<double>(values.size());
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= n;
  if (values.size() < 2) return out;
  double var = 0.0;
  for (double v : values) var += (v - out.mean) * (v - out.mean);
  out.se = std::sqrt(var / (n - 1.0) / n);
  return out;
}

/// Grid indices k with t_k in [T/2, 0.9 T].
std::pair<std::size_t, std::size_t> steady_window(std::size_t n_steps) {
  const auto first = (n_steps + 1) / 2;
  const auto last = static_cast<std::size_t>(std::floor(0.9 * static_cast<double>(n_steps) + 1e-9));
  return {first, std::max(first, last)};
}

SmoothingOptions smoothing_options(const ExperimentConfig& config, std::uint64_t stream,
                                   std::size_t workers) {
  SmoothingOptions opt;
  opt.ensemble_size = config.n_u_samples;
  opt.seed = config.seed;
  opt.stream = stream;
  opt.workers = workers;
  return opt;
}

/// Everything run_average_purity keeps from one record.
struct RecordOutcome {
  std::vector<double> purity_f, purity_s, fidelity_f, fidelity_s, ess;
  double gap_f = 0.0;
  double gap_s = 0.0;
  double window_gain = 0.0;
  StructuralDiagnostics diag;
};

RecordOutcome process_record(const ExperimentConfig& config, const OpenSystemModel& model,
                             const DensityMatrix& rho0, std::size_t r) {
  const std::size_t n = config.n_steps();
  RandomStream rng(config.seed, r, kTruthStream);
  const auto truth = simulate_true_trajectory(model, rho0, n, config.dt, rng);
  const auto filtered = filter_forward(model, truth.record, rho0);
  const auto effects = retrofilter_record(model, truth.record);
  const auto smoothed =
      smooth(model, truth.record, rho0, filtered, effects, smoothing_options(config, r, 1));

  RecordOutcome out;
  out.purity_f.resize(n + 1);
  out.purity_s.resize(n + 1);
  out.fidelity_f.resize(n + 1);
  out.fidelity_s.resize(n + 1);
  out.ess.resize(n + 1);
  auto& d = out.diag;
  d.low_ess_steps = smoothed.low_ess_steps;
  for (std::size_t k = 0; k <= n; ++k) {
    const auto& rho_t = truth.states.states[k];
    const auto& rho_f = filtered.states[k];
    const auto& rho_s = smoothed.states[k];
    out.purity_f[k] = purity(rho_f);
    out.purity_s[k] = purity(rho_s);
    out.fidelity_f[k] = fidelity(rho_t, rho_f).value;
    out.fidelity_s[k] = fidelity(rho_t, rho_s).value;
    out.ess[k] = smoothed.ess[k];
    out.gap_f += out.purity_f[k] - out.fidelity_f[k];
    out.gap_s += out.purity_s[k] - out.fidelity_s[k];
    d.max_hermiticity_error = std::max(d.max_hermiticity_error, hermiticity_error(rho_s.matrix()));
    d.min_eigenvalue = std::min(d.min_eigenvalue, min_eigenvalue(hermitize(rho_s.matrix())));
    d.max_trace_error = std::max(d.max_trace_error, std::abs(rho_s.trace() - 1.0));
    d.min_true_purity = std::min(d.min_true_purity, purity(rho_t));
  }
  out.gap_f /= static_cast<double>(n + 1);
  out.gap_s /= static_cast<double>(n + 1);
  const auto [first, last] = steady_window(n);
  for (std::size_t k = first; k <= last; ++k) out.window_gain += out.purity_s[k] - out.purity_f[k];
  out.window_gain /= static_cast<double>(last - first + 1);
  d.max_initial_error = std::max(max_entry(smoothed.states[0].matrix() - rho0.matrix()),
                                 max_entry(filtered.states[0].matrix() - rho0.matrix()));
  d.max_final_gap = max_entry(smoothed.states[n].matrix() - filtered.states[n].matrix());
  return out;
}

void add(ResultTable& t, std::string key, double value) {
  t.summary.emplace_back(std::move(key), detail::format_double(value));
}

}  // namespace

void ExperimentConfig::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(omega) || !finite(gamma) || !finite(eta) || !finite(phi) || !finite(kappa)) {
    throw ParameterError("model parameters must be finite");
  }
  if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
  if (!(eta >= 0.0 && eta <= 1.0)) throw ParameterError("eta must lie in [0, 1]");
  if (!(kappa >= 0.0)) throw ParameterError("kappa must be non-negative");
  if (!(dt > 0.0) || !finite(dt)) throw ParameterError("dt must be positive");
  if (!(t_final > 0.0) || !finite(t_final)) throw ParameterError("t_final must be positive");
  if (n_y_records < 1) throw ParameterError("n_y_records must be at least 1");
  if (n_u_samples < 1) throw ParameterError("n_u_samples must be at least 1");
  if (!(hmm_threshold > 0.0)) throw ParameterError("hmm threshold must be positive");
  if (workers < 1) throw ParameterError("workers must be at least 1");
  const double steps = t_final / dt;
  if (std::abs(steps - std::round(steps)) > 1e-6 * std::max(1.0, steps)) {
    throw ParameterError("t_final must be an integer multiple of dt");
  }
  if (steps > 1e8) throw ParameterError("too many time steps");
}

std::size_t ExperimentConfig::n_steps() const {
  return static_cast<std::size_t>(std::llround(t_final / dt));
}

OpenSystemModel ExperimentConfig::model() const { return two_level_atom(omega, gamma, eta, phi); }

DensityMatrix initial_state() { return DensityMatrix::pure(pauli::excited()); }

SingleTrajectoryResult run_single_trajectory(const ExperimentConfig& config) {
  config.validate();
  const auto model = config.model();
  const auto rho0 = initial_state();
  const std::size_t n = config.n_steps();
  RandomStream rng(config.seed, 0, kTruthStream);
  const auto truth = simulate_true_trajectory(model, rho0, n, config.dt, rng);
  const auto filtered = filter_forward(model, truth.record, rho0);
  const auto effects = retrofilter_record(model, truth.record);
  const auto smoothed = smooth(model, truth.record, rho0, filtered, effects,
                               smoothing_options(config, 0, config.workers));

  SingleTrajectoryResult out;
  out.low_ess_steps = smoothed.low_ess_steps;
  for (std::size_t k = 0; k < n; ++k) {
    if (truth.record[k].has_jump()) out.jump_times.push_back(truth.record.time(k));
  }
  out.had_jump = !out.jump_times.empty();
  out.rows.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const auto& rho_t = truth.states.states[k];
    MetricsRow row;
    row.t = filtered.time(k);
    row.purity_f = purity(filtered.states[k]);
    row.purity_s = purity(smoothed.states[k]);
    row.fidelity_f = fidelity(rho_t, filtered.states[k]).value;
    row.fidelity_s = fidelity(rho_t, smoothed.states[k]).value;
    row.bloch_f = to_bloch(filtered.states[k]);
    row.bloch_s = to_bloch(smoothed.states[k]);
    row.bloch_t = to_bloch(rho_t);
    row.ess = smoothed.ess[k];
    out.rows.push_back(row);
  }
  return out;
}

AveragePurityResult run_average_purity(const ExperimentConfig& config) {
  config.validate();
  const auto model = config.model();
  const auto rho0 = initial_state();
  const std::size_t n = config.n_steps();
  const std::size_t n_rec = config.n_y_records;

  std::vector<RecordOutcome> outcomes(n_rec);
  parallel_for(
      n_rec, [&](std::size_t r) { outcomes[r] = process_record(config, model, rho0, r); },
      config.workers);

  AveragePurityResult out;
  auto& d = out.diagnostics;
  d.final_gap_bound = 3.0 / std::sqrt(static_cast<double>(config.n_u_samples));
  std::vector<double> gap_f, gap_s, gain;
  for (const auto& o : outcomes) {
    gap_f.push_back(o.gap_f);
    gap_s.push_back(o.gap_s);
    gain.push_back(o.window_gain);
    d.max_hermiticity_error = std::max(d.max_hermiticity_error, o.diag.max_hermiticity_error);
    d.min_eigenvalue = std::min(d.min_eigenvalue, o.diag.min_eigenvalue);
    d.max_trace_error = std::max(d.max_trace_error, o.diag.max_trace_error);
    d.min_true_purity = std::min(d.min_true_purity, o.diag.min_true_purity);
    d.max_initial_error = std::max(d.max_initial_error, o.diag.max_initial_error);
    d.max_final_gap = std::max(d.max_final_gap, o.diag.max_final_gap);
    d.low_ess_steps += o.diag.low_ess_steps;
  }
  out.purity_fidelity_gap_f = mean_estimate(gap_f);
  out.purity_fidelity_gap_s = mean_estimate(gap_s);

  out.rows.resize(n + 1);
  std::vector<double> column(n_rec);
  for (std::size_t k = 0; k <= n; ++k) {
    auto& row = out.rows[k];
    row.t = static_cast<double>(k) * config.dt;
    for (std::size_t r = 0; r < n_rec; ++r) column[r] = outcomes[r].purity_f[k];
    const auto pf = mean_estimate(column);
    for (std::size_t r = 0; r < n_rec; ++r) column[r] = outcomes[r].purity_s[k];
    const auto ps = mean_estimate(column);
    row.purity_f = pf.mean;
    row.purity_f_se = pf.se;
    row.purity_s = ps.mean;
    row.purity_s_se = ps.se;
    for (const auto& o : outcomes) {
      row.fidelity_f += o.fidelity_f[k];
      row.fidelity_s += o.fidelity_s[k];
      row.ess += o.ess[k];
    }
    row.fidelity_f /= static_cast<double>(n_rec);
    row.fidelity_s /= static_cast<double>(n_rec);
    row.ess /= static_cast<double>(n_rec);
  }

  const auto [first, last] = steady_window(n);
  for (std::size_t k = first; k <= last; ++k) {
    out.window_purity_f += out.rows[k].purity_f;
    out.window_purity_s += out.rows[k].purity_s;
  }
  const auto width = static_cast<double>(last - first + 1);
  out.window_purity_f /= width;
  out.window_purity_s /= width;
  const double lost = 1.0 - out.window_purity_f;
  if (lost > 0.0) {
    out.recovery_fraction = (out.window_purity_s - out.window_purity_f) / lost;
    out.recovery_fraction_se = mean_estimate(gain).se / lost;
  }
  return out;
}

OpenSystemModel diagonal_test_model(double gamma, double kappa) {
  return OpenSystemModel(ComplexMatrix::Zero(2, 2),
                         {HomodyneChannel{std::sqrt(kappa) * pauli::sigma_z(), 0.0}},
                         {JumpChannel{std::sqrt(gamma) * pauli::sigma_minus()}});
}

HmmCheckResult run_hmm_check(const ExperimentConfig& config) {
  config.validate();
  if (config.omega != 0.0) {
    throw ParameterError("hmm-check needs omega = 0 (a model diagonal in the energy basis)");
  }
  const auto model = diagonal_test_model(config.gamma, config.kappa);
  const auto rho0 = initial_state();
  const std::size_t n = config.n_steps();
  const std::size_t n_rec = config.n_y_records;

  Eigen::MatrixXd transition(2, 2);
  transition << 1.0, config.gamma * config.dt, 0.0, 1.0 - config.gamma * config.dt;
  hmm::GaussianEmission emission;
  emission.means = Eigen::Vector2d(-2.0 * std::sqrt(config.kappa), 2.0 * std::sqrt(config.kappa));
  emission.variance = 1.0 / config.dt;
  const hmm::ClassicalModel classical(transition, emission);
  const Eigen::VectorXd prior = Eigen::Vector2d(0.0, 1.0);

  struct Deviations {
    std::vector<double> dev_f, dev_s, se_s;
    double signed_f = 0.0;
    double signed_s = 0.0;
  };
  std::vector<Deviations> per_record(n_rec);
  parallel_for(
      n_rec,
      [&](std::size_t r) {
        RandomStream rng(config.seed, r, kTruthStream);
        const auto truth = simulate_true_trajectory(model, rho0, n, config.dt, rng);
        const auto filtered = filter_forward(model, truth.record, rho0);
        const auto effects = retrofilter_record(model, truth.record);
        const auto smoothed = smooth(model, truth.record, rho0, filtered, effects,
                                     smoothing_options(config, r, 1));
        std::vector<double> ys(n);
        for (std::size_t k = 0; k < n; ++k) ys[k] = truth.record[k].y[0];
        const auto cf = hmm::hmm_filter(classical, ys, prior);
        const auto cs = hmm::hmm_smooth(classical, ys, prior);
        auto& dv = per_record[r];
        dv.dev_f.resize(n + 1);
        dv.dev_s.resize(n + 1);
        dv.se_s.resize(n + 1);
        for (std::size_t k = 0; k <= n; ++k) {
          const double f = filtered.states[k].matrix()(1, 1).real() - cf[k].probs[1];
          const double s = smoothed.states[k].matrix()(1, 1).real() - cs[k].probs[1];
          dv.dev_f[k] = std::abs(f);
          dv.dev_s[k] = std::abs(s);
          dv.se_s[k] = smoothed.standard_errors[k](1, 1);
          dv.signed_f += f;
          dv.signed_s += s;
        }
        dv.signed_f /= static_cast<double>(n + 1);
        dv.signed_s /= static_cast<double>(n + 1);
      },
      config.workers);

  HmmCheckResult out;
  out.rows.resize(n + 1);
  std::vector<double> signed_f, signed_s;
  for (const auto& dv : per_record) {
    signed_f.push_back(dv.signed_f);
    signed_s.push_back(dv.signed_s);
  }
  out.mean_deviation_f = mean_estimate(signed_f);
  out.mean_deviation_s = mean_estimate(signed_s);
  for (std::size_t k = 0; k <= n; ++k) {
    auto& row = out.rows[k];
    row.t = static_cast<double>(k) * config.dt;
    for (const auto& dv : per_record) {
      row.max_deviation_f = std::max(row.max_deviation_f, dv.dev_f[k]);
      row.max_deviation_s = std::max(row.max_deviation_s, dv.dev_s[k]);
      row.mean_se_s += dv.se_s[k];
    }
    row.mean_se_s /= static_cast<double>(n_rec);
    out.max_deviation_f = std::max(out.max_deviation_f, row.max_deviation_f);
    out.max_deviation_s = std::max(out.max_deviation_s, row.max_deviation_s);
    out.mean_se_s += row.mean_se_s;
  }
  out.mean_se_s /= static_cast<double>(n + 1);
  out.filtered_within_3sigma =
      std::abs(out.mean_deviation_f.mean) <= 3.0 * out.mean_deviation_f.se;
  out.smoothed_within_3sigma =
      std::abs(out.mean_deviation_s.mean) <= 3.0 * out.mean_deviation_s.se;
  out.within_threshold = std::max(out.max_deviation_f, out.max_deviation_s) <= config.hmm_threshold;
  return out;
}

ConvergenceResult run_convergence(const ExperimentConfig& config) {
  config.validate();
  ExperimentConfig half = config;
  half.dt = config.dt / 2.0;
  const auto coarse = run_average_purity(config);
  const auto fine = run_average_purity(half);

  ConvergenceResult out;
  out.recovery_fraction = coarse.recovery_fraction;
  out.recovery_fraction_half = fine.recovery_fraction;
  out.rows.reserve(coarse.rows.size());
  for (std::size_t k = 0; k < coarse.rows.size(); ++k) {
    ConvergenceRow row;
    row.t = coarse.rows[k].t;
    row.purity_f = coarse.rows[k].purity_f;
    row.purity_s = coarse.rows[k].purity_s;
    row.purity_f_half = fine.rows[2 * k].purity_f;
    row.purity_s_half = fine.rows[2 * k].purity_s;
    out.max_drift_f = std::max(out.max_drift_f, std::abs(row.purity_f - row.purity_f_half));
    out.max_drift_s = std::max(out.max_drift_s, std::abs(row.purity_s - row.purity_s_half));
    out.rows.push_back(row);
  }
  return out;
}

ResultTable to_table(const SingleTrajectoryResult& result) {
  ResultTable t;
  t.kind = "single";
  t.columns = {"t",         "purity_F",  "purity_S",  "fidelity_F", "fidelity_S",
               "bloch_F_x", "bloch_F_y", "bloch_F_z", "bloch_S_x",  "bloch_S_y",
               "bloch_S_z", "bloch_T_x", "bloch_T_y", "bloch_T_z",  "ess"};
  for (const auto& r : result.rows) {
    t.rows.push_back({r.t, r.purity_f, r.purity_s, r.fidelity_f, r.fidelity_s, r.bloch_f.x,
                      r.bloch_f.y, r.bloch_f.z, r.bloch_s.x, r.bloch_s.y, r.bloch_s.z,
                      r.bloch_t.x, r.bloch_t.y, r.bloch_t.z, r.ess});
  }
  t.summary.emplace_back("had_jump", result.had_jump ? "true" : "false");
  std::string times;
  for (double v : result.jump_times) {
    if (!times.empty()) times += ' ';
    times += detail::format_double(v);
  }
  t.summary.emplace_back("jump_times", times);
  add(t, "low_ess_steps", static_cast<double>(result.low_ess_steps));
  return t;
}

ResultTable to_table(const AveragePurityResult& result) {
  ResultTable t;
  t.kind = "average";
  t.columns = {"t",          "purity_F",   "purity_F_se", "purity_S", "purity_S_se",
               "fidelity_F", "fidelity_S", "ess"};
  for (const auto& r : result.rows) {
    t.rows.push_back({r.t, r.purity_f, r.purity_f_se, r.purity_s, r.purity_s_se, r.fidelity_f,
                      r.fidelity_s, r.ess});
  }
  const auto& d = result.diagnostics;
  add(t, "recovery_fraction", result.recovery_fraction);
  add(t, "recovery_fraction_se", result.recovery_fraction_se);
  add(t, "window_purity_F", result.window_purity_f);
  add(t, "window_purity_S", result.window_purity_s);
  add(t, "purity_fidelity_gap_F", result.purity_fidelity_gap_f.mean);
  add(t, "purity_fidelity_gap_F_se", result.purity_fidelity_gap_f.se);
  add(t, "purity_fidelity_gap_S", result.purity_fidelity_gap_s.mean);
  add(t, "purity_fidelity_gap_S_se", result.purity_fidelity_gap_s.se);
  add(t, "max_hermiticity_error", d.max_hermiticity_error);
  add(t, "min_eigenvalue", d.min_eigenvalue);
  add(t, "max_trace_error", d.max_trace_error);
  add(t, "min_true_purity", d.min_true_purity);
  add(t, "max_initial_error", d.max_initial_error);
  add(t, "max_final_gap", d.max_final_gap);
  add(t, "final_gap_bound", d.final_gap_bound);
  add(t, "low_ess_steps", static_cast<double>(d.low_ess_steps));
  return t;
}

ResultTable to_table(const HmmCheckResult& result) {
  ResultTable t;
  t.kind = "hmm-check";
  t.columns = {"t", "max_deviation_F", "max_deviation_S", "mean_se_S"};
  for (const auto& r : result.rows) {
    t.rows.push_back({r.t, r.max_deviation_f, r.max_deviation_s, r.mean_se_s});
  }
  add(t, "max_deviation_F", result.max_deviation_f);
  add(t, "max_deviation_S", result.max_deviation_s);
  add(t, "mean_se_S", result.mean_se_s);
  add(t, "mean_deviation_F", result.mean_deviation_f.mean);
  add(t, "mean_deviation_F_se", result.mean_deviation_f.se);
  add(t, "mean_deviation_S", result.mean_deviation_s.mean);
  add(t, "mean_deviation_S_se", result.mean_deviation_s.se);
  t.summary.emplace_back("filtered_within_3sigma", result.filtered_within_3sigma ? "true" : "false");
  t.summary.emplace_back("smoothed_within_3sigma", result.smoothed_within_3sigma ? "true" : "false");
  t.summary.emplace_back("within_threshold", result.within_threshold ? "true" : "false");
  return t;
}

ResultTable to_table(const ConvergenceResult& result) {
  ResultTable t;
  t.kind = "convergence";
  t.columns = {"t", "purity_F", "purity_F_half_dt", "purity_S", "purity_S_half_dt"};
  for (const auto& r : result.rows) {
    t.rows.push_back({r.t, r.purity_f, r.purity_f_half, r.purity_s, r.purity_s_half});
  }
  add(t, "max_drift_F", result.max_drift_f);
  add(t, "max_drift_S", result.max_drift_s);
  add(t, "recovery_fraction", result.recovery_fraction);
  add(t, "recovery_fraction_half_dt", result.recovery_fraction_half);
  return t;
}

}  // namespace qsmooth
