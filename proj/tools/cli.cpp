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

#include "cli.hpp"

#include <map>
#include <string>

#include "CLI11.hpp"
#include "qsmooth/errors.hpp"
#include "qsmooth/experiment.hpp"
#include "qsmooth/parallel.hpp"

namespace qsmooth {

namespace {

void add_common_options(CLI::App& cmd, ExperimentConfig& cfg) {
  cmd.add_option("--omega", cfg.omega, "Rabi frequency")->capture_default_str();
  cmd.add_option("--gamma", cfg.gamma, "Radiative decay rate")->capture_default_str();
  cmd.add_option("--eta", cfg.eta, "Observed fraction of the fluorescence")
      ->capture_default_str();
  cmd.add_option("--phi", cfg.phi, "Local-oscillator phase (0: X, pi/2: Y)")
      ->capture_default_str();
  cmd.add_option("--dt", cfg.dt, "Time step")->capture_default_str();
  cmd.add_option("--t-final", cfg.t_final, "Final time")->capture_default_str();
  cmd.add_option("--n-y-records", cfg.n_y_records, "Number of observed records")
      ->capture_default_str();
  cmd.add_option("--n-u-samples", cfg.n_u_samples, "Unobserved records per observed record")
      ->capture_default_str();
  cmd.add_option("--seed", cfg.seed, "Root random seed")->capture_default_str();
  cmd.add_option("--output", cfg.output_path, "Results file (stdout if omitted)");
  const std::map<std::string, OutputFormat> formats{{"csv", OutputFormat::csv},
                                                    {"json", OutputFormat::json}};
  cmd.add_option("--format", cfg.output_format, "Output format: csv or json")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case))
      ->option_text("csv|json [csv]");
}

void emit(const ExperimentConfig& cfg, const ResultTable& table, std::ostream& out) {
  if (cfg.output_path.empty()) {
    if (cfg.output_format == OutputFormat::json) {
      write_json(out, table);
    } else {
      write_csv(out, table);
    }
    return;
  }
  save_table(cfg.output_path, cfg.output_format, table);
  write_summary(out, table);
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum state smoothing for a partially observed two-level atom", "qsmooth"};
  app.require_subcommand(1);

  ExperimentConfig single_cfg, average_cfg, hmm_cfg, convergence_cfg;
  hmm_cfg.omega = 0.0;
  hmm_cfg.phi = 0.0;
  hmm_cfg.n_y_records = 50;

  auto* single = app.add_subcommand("single", "One true trajectory with filtered and smoothed estimates");
  add_common_options(*single, single_cfg);
  auto* average = app.add_subcommand("average", "Record-averaged purities and recovery fraction");
  add_common_options(*average, average_cfg);
  auto* hmm_check =
      app.add_subcommand("hmm-check", "Compare a diagonal model with the classical HMM smoother");
  add_common_options(*hmm_check, hmm_cfg);
  hmm_check->add_option("--kappa", hmm_cfg.kappa, "Strength of the observed sigma_z channel")
      ->capture_default_str();
  hmm_check->add_option("--threshold", hmm_cfg.hmm_threshold, "Largest allowed deviation")
      ->capture_default_str();
  auto* convergence =
      app.add_subcommand("convergence", "Average purities at dt and dt/2 and their drift");
  add_common_options(*convergence, convergence_cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitConfig;
  }

  const std::size_t workers = worker_count();
  try {
    if (single->parsed()) {
      single_cfg.workers = workers;
      emit(single_cfg, to_table(run_single_trajectory(single_cfg)), out);
    } else if (average->parsed()) {
      average_cfg.workers = workers;
      emit(average_cfg, to_table(run_average_purity(average_cfg)), out);
    } else if (hmm_check->parsed()) {
      hmm_cfg.workers = workers;
      const auto result = run_hmm_check(hmm_cfg);
      emit(hmm_cfg, to_table(result), out);
      err << "max deviation: filtered " << result.max_deviation_f << ", smoothed "
          << result.max_deviation_s << " (threshold " << hmm_cfg.hmm_threshold << ")\n";
      if (!result.within_threshold) return kExitNumerical;
    } else if (convergence->parsed()) {
      convergence_cfg.workers = workers;
      emit(convergence_cfg, to_table(run_convergence(convergence_cfg)), out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DegenerateEnsembleError& e) {
    err << "error: " << e.what() << " (step " << e.step() << ", t = " << e.time()
        << "); increase --n-u-samples\n";
    return kExitNumerical;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace qsmooth
