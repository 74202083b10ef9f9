#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "l80/mlp.hpp"

namespace l80 {

enum class Split : std::uint8_t { train, val, test };

/// Supervised pairs, one sample per row, with their time stamps (days).
struct Dataset {
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd targets;
  std::vector<double> times;
  std::vector<Split> labels;

  std::size_t size() const { return static_cast<std::size_t>(inputs.rows()); }
  void validate() const;

  Dataset subset(Split which) const;
  std::size_t count(Split which) const;
};

enum class SplitMode : std::uint8_t { random, predefined };

SplitMode parse_split_mode(const std::string& text);
std::string to_string(SplitMode mode);

inline constexpr double kTrainFraction = 0.70;
inline constexpr double kValFraction = 0.15;

/// random: seeded uniform shuffle, then a 70/15/15 cut.
/// predefined: chronological contiguous 70/15/15 blocks (seed unused).
Dataset split_dataset(Dataset ds, SplitMode mode, std::uint64_t seed);

/// Full-batch Adam.
struct OptimizerConfig {
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t epochs = 2000;
};

/// Mean over rows of the squared error, in normalized target units.
struct EpochLoss {
  double train = 0.0;
  double val = 0.0;
  double test = 0.0;
};

struct TrainResult {
  MlpParams model;                 // best-validation parameters, normalizations attached
  std::vector<EpochLoss> history;  // one entry per epoch, parameters before that epoch's update
  std::size_t best_epoch = 0;
};

/// Thrown when a loss turns non-finite; carries the history so far.
class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(std::size_t epoch, std::vector<EpochLoss> history)
      : std::runtime_error("non-finite loss at epoch " + std::to_string(epoch)),
        history(std::move(history)) {}
  std::vector<EpochLoss> history;
};

/// Fits per-component shift (training mean) and scale (max |deviation|) on the
/// training rows, then trains the normalized network with full-batch Adam.
/// Returns the parameters that achieved the lowest validation loss.
TrainResult train(const MlpParams& m0, const Dataset& ds, const OptimizerConfig& opt);

/// Pooled fraction of unexplained variance on one split:
/// sum_j MSE_j / sum_j Var_j over the rows labelled `which`.
double normalized_mse(const MlpParams& m, const Dataset& ds, Split which);

}  // namespace l80
