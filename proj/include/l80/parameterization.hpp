#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "l80/mlp.hpp"
#include "l80/model.hpp"
#include "l80/signal.hpp"
#include "l80/training.hpp"
#include "l80/trajectory.hpp"

namespace l80 {

enum class ParamKind : std::uint8_t { slow_pair, vanilla, external };

std::string to_string(ParamKind kind);

/// A closure of the y-equation: maps y to an estimate of x (and, for the
/// slow pair, of z).
///
///   slow_pair: z = Z(y), x = X(y, z)
///   vanilla:   x = V(y)
///   external:  any user-supplied map, e.g. an analytic balance manifold.
class Parameterization {
 public:
  using Map = std::function<Vec3(const Vec3&)>;

  static Parameterization slow_pair(MlpParams z_net, MlpParams x_net);
  static Parameterization vanilla(MlpParams v_net);
  static Parameterization external(std::string name, Map x_of_y, Map z_of_y = {});

  ParamKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  Vec3 x_of(const Vec3& y) const;
  /// Only slow pairs and externals given a z map have one.
  std::optional<Vec3> z_of(const Vec3& y) const;

  const MlpParams* z_net() const { return z_net_ ? &*z_net_ : nullptr; }
  const MlpParams* x_net() const { return x_net_ ? &*x_net_ : nullptr; }

 private:
  ParamKind kind_ = ParamKind::external;
  std::string name_;
  std::optional<MlpParams> z_net_;
  std::optional<MlpParams> x_net_;
  Map x_map_;
  Map z_map_;
};

struct TrainOptions {
  OptimizerConfig optimizer;
  /// Length of the supervised record taken from the start of the trajectory.
  double span_days = 700.0;
  /// Keep every k-th row of the record (1 = all).
  std::size_t row_stride = 1;
};

struct SlowPairResult {
  Parameterization param;
  TrainResult z_stage;
  TrainResult x_stage;
  Dataset z_data;
  Dataset x_data;
};

struct VanillaResult {
  Parameterization param;
  TrainResult stage;
  Dataset data;
};

/// Stage 1: unfiltered y -> filtered z. Stage 2: (y, Z*(y)) -> filtered x,
/// with Z* frozen. Both stages share the split mode; stage 2 uses seed + 1
/// for its weights.
SlowPairResult train_slow_pair(const Trajectory& traj, const FilterSpec& filter, Architecture arch,
                               SplitMode mode, std::uint64_t seed, const TrainOptions& opts);

/// Unfiltered y -> unfiltered x in a single stage.
VanillaResult train_vanilla(const Trajectory& traj, Architecture arch, SplitMode mode,
                            std::uint64_t seed, const TrainOptions& opts);

/// Supervised pairs from a full-state trajectory: unfiltered y at each
/// filtered sample time, with the filtered block [first, first+3) as target.
/// `window` = 1 means no filtering.
Dataset build_dataset(const Trajectory& traj, std::size_t window, std::size_t target_first,
                      const TrainOptions& opts);

}  // namespace l80
