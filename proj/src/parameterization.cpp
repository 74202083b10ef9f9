#include "l80/parameterization.hpp"

#include <cmath>
#include <stdexcept>

#include "l80/errors.hpp"

namespace l80 {

std::string to_string(ParamKind kind) {
  switch (kind) {
    case ParamKind::slow_pair:
      return "slow_pair";
    case ParamKind::vanilla:
      return "vanilla";
    case ParamKind::external:
      break;
  }
  return "external";
}

Parameterization Parameterization::slow_pair(MlpParams z_net, MlpParams x_net) {
  z_net.validate();
  x_net.validate();
  if (z_net.in_dim != 3 || z_net.out_dim != 3) throw std::invalid_argument("slow pair: Z must map R^3 -> R^3");
  if (x_net.in_dim != 6 || x_net.out_dim != 3) throw std::invalid_argument("slow pair: X must map R^6 -> R^3");
  Parameterization p;
  p.kind_ = ParamKind::slow_pair;
  p.name_ = "slow_pair";
  p.z_net_ = std::move(z_net);
  p.x_net_ = std::move(x_net);
  return p;
}

Parameterization Parameterization::vanilla(MlpParams v_net) {
  v_net.validate();
  if (v_net.in_dim != 3 || v_net.out_dim != 3) throw std::invalid_argument("vanilla: V must map R^3 -> R^3");
  Parameterization p;
  p.kind_ = ParamKind::vanilla;
  p.name_ = "vanilla";
  p.x_net_ = std::move(v_net);
  return p;
}

Parameterization Parameterization::external(std::string name, Map x_of_y, Map z_of_y) {
  if (!x_of_y) throw std::invalid_argument("external parameterization needs an x map");
  Parameterization p;
  p.kind_ = ParamKind::external;
  p.name_ = std::move(name);
  p.x_map_ = std::move(x_of_y);
  p.z_map_ = std::move(z_of_y);
  return p;
}

Vec3 Parameterization::x_of(const Vec3& y) const {
  Vec3 x{};
  switch (kind_) {
    case ParamKind::slow_pair: {
      double in[6] = {y[0], y[1], y[2], 0.0, 0.0, 0.0};
      mlp_forward_into(*z_net_, y.data(), in + 3);
      mlp_forward_into(*x_net_, in, x.data());
      break;
    }
    case ParamKind::vanilla:
      mlp_forward_into(*x_net_, y.data(), x.data());
      break;
    case ParamKind::external:
      x = x_map_(y);
      break;
  }
  return x;
}

std::optional<Vec3> Parameterization::z_of(const Vec3& y) const {
  if (kind_ == ParamKind::slow_pair) {
    Vec3 z{};
    mlp_forward_into(*z_net_, y.data(), z.data());
    return z;
  }
  if (kind_ == ParamKind::external && z_map_) return z_map_(y);
  return std::nullopt;
}

Dataset build_dataset(const Trajectory& traj, std::size_t window, std::size_t target_first,
                      const TrainOptions& opts) {
  traj.validate();
  if (traj.n_components != 9) throw std::invalid_argument("dataset: need a full-state trajectory");
  if (opts.row_stride < 1) throw std::invalid_argument("dataset: row_stride must be >= 1");
  const Trajectory filtered = window > 1 ? moving_average(traj, window) : traj;
  const std::size_t offset = window / 2;

  const auto needed = static_cast<std::size_t>(std::llround(opts.span_days / traj.dt)) + 1;
  if (filtered.size() < needed) {
    throw InsufficientData("dataset: trajectory too short for a " + std::to_string(opts.span_days) +
                           "-day record after filtering");
  }
  const std::size_t rows = (needed - 1) / opts.row_stride + 1;
  Dataset ds;
  ds.inputs.resize(static_cast<Eigen::Index>(rows), 3);
  ds.targets.resize(static_cast<Eigen::Index>(rows), 3);
  ds.times.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t i = r * opts.row_stride;
    for (int c = 0; c < 3; ++c) {
      ds.inputs(static_cast<Eigen::Index>(r), c) = traj.at(i + offset, 3 + c);
      ds.targets(static_cast<Eigen::Index>(r), c) = filtered.at(i, target_first + c);
    }
    ds.times[r] = filtered.time(i);
  }
  return ds;
}

SlowPairResult train_slow_pair(const Trajectory& traj, const FilterSpec& filter, Architecture arch,
                               SplitMode mode, std::uint64_t seed, const TrainOptions& opts) {
  const std::size_t window = filter.window_samples(traj.dt);

  Dataset z_data = split_dataset(build_dataset(traj, window, 6, opts), mode, seed);
  TrainResult z_stage = train(init_mlp(3, 3, arch, seed), z_data, opts.optimizer);

  Dataset x_data = split_dataset(build_dataset(traj, window, 0, opts), mode, seed);
  const Eigen::MatrixXd z_hat = mlp_forward_batch(z_stage.model, x_data.inputs);
  Eigen::MatrixXd stage2_in(x_data.inputs.rows(), 6);
  stage2_in << x_data.inputs, z_hat;
  x_data.inputs = std::move(stage2_in);
  TrainResult x_stage = train(init_mlp(6, 3, arch, seed + 1), x_data, opts.optimizer);

  Parameterization param = Parameterization::slow_pair(z_stage.model, x_stage.model);
  return {std::move(param), std::move(z_stage), std::move(x_stage), std::move(z_data),
          std::move(x_data)};
}

VanillaResult train_vanilla(const Trajectory& traj, Architecture arch, SplitMode mode,
                            std::uint64_t seed, const TrainOptions& opts) {
  Dataset data = split_dataset(build_dataset(traj, 1, 0, opts), mode, seed);
  TrainResult stage = train(init_mlp(3, 3, arch, seed), data, opts.optimizer);
  Parameterization param = Parameterization::vanilla(stage.model);
  return {std::move(param), std::move(stage), std::move(data)};
}

}  // namespace l80
