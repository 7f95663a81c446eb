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
#include <iosfwd>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "qsmooth/model.hpp"
#include "qsmooth/operator.hpp"

namespace qsmooth {

enum class OutputFormat { csv, json };

struct ExperimentConfig {
  double omega = 20.0;
  double gamma = 1.0;
  double eta = 10.0 / 11.0;
  double phi = std::numbers::pi / 2.0;
  double dt = 1e-3;
  double t_final = 4.0;
  std::size_t n_y_records = 200;
  std::size_t n_u_samples = 2000;
  std::uint64_t seed = 0;
  /// Strength of the observed sigma_z channel in the hmm-check model.
  double kappa = 1.0;
  /// hmm-check fails when the largest deviation exceeds this.
  double hmm_threshold = 0.1;
  std::string output_path;
  OutputFormat output_format = OutputFormat::csv;
  /// Threads for records and samples. Results do not depend on it.
  std::size_t workers = 1;

  /// Throws ParameterError on an invalid combination.
  void validate() const;
  std::size_t n_steps() const;
  OpenSystemModel model() const;
};

/// rho0 = |1><1|, the excited state.
DensityMatrix initial_state();

struct MetricsRow {
  double t = 0.0;
  double purity_f = 0.0;
  double purity_s = 0.0;
  double fidelity_f = 0.0;
  double fidelity_s = 0.0;
  BlochVector bloch_f;
  BlochVector bloch_s;
  BlochVector bloch_t;
  double ess = 0.0;
};

struct SingleTrajectoryResult {
  std::vector<MetricsRow> rows;
  bool had_jump = false;
  std::vector<double> jump_times;
  std::size_t low_ess_steps = 0;
};

/// One true (Y, N) pair from RandomStream(seed, 0, kTruthStream), with the
/// filtered and smoothed estimates of its state.
SingleTrajectoryResult run_single_trajectory(const ExperimentConfig& config);

struct AverageRow {
  double t = 0.0;
  double purity_f = 0.0;
  double purity_f_se = 0.0;
  double purity_s = 0.0;
  double purity_s_se = 0.0;
  double fidelity_f = 0.0;
  double fidelity_s = 0.0;
  double ess = 0.0;
};

/// Mean and standard error of a per-record statistic.
struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
};

/// Worst values of the structural checks over every record and grid point.
struct StructuralDiagnostics {
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = 1.0;
  double max_trace_error = 0.0;
  double min_true_purity = 1.0;
  /// max-entry norm of rho_S(0) - rho0 and rho_F(0) - rho0.
  double max_initial_error = 0.0;
  /// max-entry norm of rho_S(T) - rho_F(T), and the 3/sqrt(M) bound.
  double max_final_gap = 0.0;
  double final_gap_bound = 0.0;
  std::size_t low_ess_steps = 0;
};

struct AveragePurityResult {
  std::vector<AverageRow> rows;
  /// Window [T/2, 0.9 T] averages of the mean purities.
  double window_purity_f = 0.0;
  double window_purity_s = 0.0;
  /// (P_S - P_F) / (1 - P_F) on the window averages.
  double recovery_fraction = 0.0;
  double recovery_fraction_se = 0.0;
  /// Per record, grid average of purity minus fidelity with rho_T.
  MeanEstimate purity_fidelity_gap_f;
  MeanEstimate purity_fidelity_gap_s;
  StructuralDiagnostics diagnostics;
};

/// n_y_records true pairs from RandomStream(seed, r, kTruthStream), each
/// smoothed with n_u_samples drawn on stream r.
AveragePurityResult run_average_purity(const ExperimentConfig& config);

/// H = 0, observed sqrt(kappa) sigma_z homodyne at phase 0, unobserved
/// sqrt(gamma) sigma_-. Diagonal in the energy basis for every record.
OpenSystemModel diagonal_test_model(double gamma, double kappa);

struct HmmRow {
  double t = 0.0;
  /// Largest |<1|rho|1> - p(1)| over records.
  double max_deviation_f = 0.0;
  double max_deviation_s = 0.0;
  /// Mean over records of the smoother's standard error of <1|rho_S|1>.
  double mean_se_s = 0.0;
};

struct HmmCheckResult {
  std::vector<HmmRow> rows;
  double max_deviation_f = 0.0;
  double max_deviation_s = 0.0;
  /// Smoother standard error of <1|rho_S|1>, averaged over records and grid.
  double mean_se_s = 0.0;
  /// Per record, grid average of the signed deviation.
  MeanEstimate mean_deviation_f;
  MeanEstimate mean_deviation_s;
  /// |mean deviation| <= 3 of its standard error across records.
  bool filtered_within_3sigma = false;
  bool smoothed_within_3sigma = false;
  /// Both maxima at or below the configured threshold.
  bool within_threshold = false;
};

/// Compares the quantum filter and smoother of diagonal_test_model with the
/// two-state HMM that has decay probability gamma dt and emission
/// Normal(+-2 sqrt(kappa), 1/dt).
HmmCheckResult run_hmm_check(const ExperimentConfig& config);

struct ConvergenceRow {
  double t = 0.0;
  double purity_f = 0.0;
  double purity_f_half = 0.0;
  double purity_s = 0.0;
  double purity_s_half = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  double max_drift_f = 0.0;
  double max_drift_s = 0.0;
  double recovery_fraction = 0.0;
  double recovery_fraction_half = 0.0;
};

/// run_average_purity at dt and dt/2, compared on the coarse grid.
ConvergenceResult run_convergence(const ExperimentConfig& config);

/// Column-oriented results with key/value summary lines.
struct ResultTable {
  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> summary;
};

ResultTable to_table(const SingleTrajectoryResult& result);
ResultTable to_table(const AveragePurityResult& result);
ResultTable to_table(const HmmCheckResult& result);
ResultTable to_table(const ConvergenceResult& result);

/// CSV: "# qsmooth-v1", "# kind: ...", one "# key: value" line per summary
/// entry, the column header and the rows. Numbers use the shortest
/// round-trip form.
void write_csv(std::ostream& os, const ResultTable& table);
/// JSON object with "version", "kind", "summary" and "rows" (an array of
/// row objects keyed by column name).
void write_json(std::ostream& os, const ResultTable& table);
void save_table(const std::string& path, OutputFormat format, const ResultTable& table);
void write_summary(std::ostream& os, const ResultTable& table);

}  // namespace qsmooth
