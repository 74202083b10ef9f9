// Command-line entry point: simulate, train, close, lobes, surface.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "l80/diagnostics.hpp"
#include "l80/errors.hpp"
#include "l80/pipelines.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string regime;
  std::optional<std::uint64_t> seed;
  std::string split;
  std::string arch;
  std::string out;
  bool csv = false;
  std::optional<std::uint64_t> stride;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Experiment config file (sectioned key=value)");
  cmd->add_option("--regime", o.regime, "Regime preset")->check(CLI::IsMember({"hlf", "slow"}));
  cmd->add_option("--seed", o.seed, "Seed for every random choice");
  cmd->add_option("--split", o.split, "Train/val/test selection")->check(CLI::IsMember({"random", "predefined"}));
  cmd->add_option("--arch", o.arch, "Hidden layers x neurons, e.g. 1x5");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_flag("--csv", o.csv, "Also write CSV trajectories");
  cmd->add_option("--stride", o.stride, "Recording stride in steps")->check(CLI::PositiveNumber);
}

l80::ExperimentConfig resolve(const Overrides& o) {
  l80::ExperimentConfig cfg = o.config.empty() ? l80::ExperimentConfig{} : l80::load_experiment_config(o.config);
  if (!o.regime.empty()) {
    cfg.regime = o.regime;
    cfg.params_file.clear();
  }
  if (o.seed) cfg.seed = *o.seed;
  if (!o.split.empty()) cfg.split = l80::parse_split_mode(o.split);
  if (!o.arch.empty()) cfg.arch = l80::Architecture::parse(o.arch);
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (o.csv) cfg.csv = true;
  if (o.stride) {
    cfg.stride = *o.stride;
    cfg.closure_stride = *o.stride;
  }
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lorenz-80 neural closure laboratory"};
  app.require_subcommand(1);

  Overrides sim_o, train_o, close_o, lobes_o, surf_o;
  std::optional<double> days;
  auto* sim = app.add_subcommand("simulate", "Integrate the full model and record a trajectory");
  add_common(sim, sim_o);
  sim->add_option("--days", days, "Recorded span in days (overrides integration.record_days)");

  std::string kind, train_traj;
  auto* tr = app.add_subcommand("train", "Train a slow pair or a vanilla parameterization");
  add_common(tr, train_o);
  tr->add_option("--kind", kind, "slow_pair or vanilla")->required()->check(CLI::IsMember({"slow_pair", "vanilla"}));
  tr->add_option("--trajectory", train_traj, "Full-state trajectory file")->required()->check(CLI::ExistingFile);

  std::string model_dir, truth;
  auto* cl = app.add_subcommand("close", "Run a neural closure and its diagnostics");
  add_common(cl, close_o);
  cl->add_option("--model-dir", model_dir, "Directory written by train")->required()->check(CLI::ExistingDirectory);
  cl->add_option("--trajectory", truth, "Reference full-model trajectory")->required()->check(CLI::ExistingFile);

  std::string lobes_traj;
  auto* lb = app.add_subcommand("lobes", "Lobe transitions, sojourn histogram and exponential fit");
  add_common(lb, lobes_o);
  lb->add_option("--trajectory", lobes_traj, "Trajectory file")->required()->check(CLI::ExistingFile);
  std::optional<double> y_b;
  lb->add_option("--y-b", y_b, "Lobe threshold")->check(CLI::PositiveNumber);

  std::string surf_dir;
  char surf_output = 'x';
  std::size_t surf_comp = 3, surf_res = 200;
  std::optional<double> radius;
  std::string surf_traj;
  auto* sf = app.add_subcommand("surface", "Export a sphere level set of a trained map");
  add_common(sf, surf_o);
  sf->add_option("--model-dir", surf_dir, "Directory written by train")->required()->check(CLI::ExistingDirectory);
  sf->add_option("--output", surf_output, "x or z");
  sf->add_option("--component", surf_comp, "1, 2 or 3");
  sf->add_option("--radius", radius, "Sphere radius (default: RMS |y| of --trajectory, else 1)");
  sf->add_option("--trajectory", surf_traj, "Trajectory whose RMS |y| sets the radius")->check(CLI::ExistingFile);
  sf->add_option("--resolution", surf_res, "Grid count per angular axis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : l80::kExitConfig;
  }

  try {
    if (*sim) {
      auto cfg = resolve(sim_o);
      if (days) cfg.record_days = *days;
      l80::cmd_simulate(cfg);
    } else if (*tr) {
      l80::cmd_train(resolve(train_o), kind == "slow_pair" ? l80::ParamKind::slow_pair : l80::ParamKind::vanilla,
                     train_traj);
    } else if (*cl) {
      l80::cmd_close(resolve(close_o), model_dir, truth);
    } else if (*lb) {
      auto cfg = resolve(lobes_o);
      if (y_b) cfg.y_b = *y_b;
      l80::cmd_lobes(cfg, lobes_traj);
    } else if (*sf) {
      double r = 1.0;
      if (radius) {
        r = *radius;
      } else if (!surf_traj.empty()) {
        r = l80::rms_y_radius(l80::load_trajectory(surf_traj));
      }
      l80::cmd_surface(resolve(surf_o), surf_dir, surf_output, surf_comp, r, surf_res);
    }
  } catch (const std::exception& e) {
    std::cerr << "l80: " << e.what() << '\n';
    return l80::exit_code_for(e);
  }
  return l80::kExitOk;
}
