#pragma once

#include <exception>
#include <string>

#include "l80/experiment.hpp"
#include "l80/parameterization.hpp"

namespace l80 {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBlowUp = 3;
inline constexpr int kExitInsufficientData = 4;

/// Maps ConfigError / BlowUp / InsufficientData to their exit codes, anything else to 1.
int exit_code_for(const std::exception& e);

/// spinup_then_record; writes trajectory.l80t (+ .csv) and manifest_simulate.txt.
void cmd_simulate(const ExperimentConfig& cfg);

/// Trains a slow pair (filtered targets) or a vanilla net (unfiltered
/// targets) on the first span_days of the trajectory file. Writes the model
/// files, sidecars, loss histories, parameterization.txt and manifest_train.txt.
void cmd_train(const ExperimentConfig& cfg, ParamKind kind, const std::string& trajectory_path);

/// Loads what cmd_train wrote. `kind = zero` in parameterization.txt gives the x = 0 stub.
Parameterization load_parameterization(const std::string& model_dir);

/// Runs the closure from the truth's final y, then writes closure.l80t,
/// the HF residual of the map on the truth, the spectral deficit, lobe
/// statistics and summary.txt. On blow-up the partial run is still written
/// before BlowUp is rethrown.
void cmd_close(const ExperimentConfig& cfg, const std::string& model_dir,
               const std::string& truth_path);

/// Lobe statistics of y3: records.csv, histogram.csv, fit.csv, summary.txt.
void cmd_lobes(const ExperimentConfig& cfg, const std::string& trajectory_path);

/// Sphere level-set export of one output component of a trained map.
void cmd_surface(const ExperimentConfig& cfg, const std::string& model_dir, char output,
                 std::size_t component, double radius, std::size_t resolution);

}  // namespace l80
