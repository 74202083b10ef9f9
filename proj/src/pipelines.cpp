#include "l80/pipelines.hpp"

#include <filesystem>
#include <sstream>

#include "l80/closure.hpp"
#include "l80/diagnostics.hpp"
#include "l80/errors.hpp"
#include "l80/integrator.hpp"
#include "l80/kv.hpp"
#include "l80/lobes.hpp"
#include "l80/signal.hpp"

namespace fs = std::filesystem;

namespace l80 {

namespace {

std::string path_in(const ExperimentConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out_dir) / name).string();
}

void prepare_out_dir(const ExperimentConfig& cfg) { fs::create_directories(cfg.out_dir); }

std::string history_csv(const std::vector<EpochLoss>& history) {
  std::ostringstream os;
  os.precision(17);
  os << "epoch,train,val,test\n";
  for (std::size_t e = 0; e < history.size(); ++e) {
    os << e << ',' << history[e].train << ',' << history[e].val << ',' << history[e].test << '\n';
  }
  return os.str();
}

std::string sidecar(const ExperimentConfig& cfg, const std::string& role, const TrainResult& r,
                    const Dataset& data) {
  std::ostringstream os;
  os.precision(17);
  const auto& best = r.history[r.best_epoch];
  os << "role = " << role << "\narchitecture = " << r.model.hidden_layers << 'x' << r.model.width
     << "\nin_dim = " << r.model.in_dim << "\nout_dim = " << r.model.out_dim << "\nseed = " << cfg.seed
     << "\nsplit = " << to_string(cfg.split) << "\nepochs = " << r.history.size()
     << "\nbest_epoch = " << r.best_epoch << "\nbest_train_loss = " << best.train
     << "\nbest_val_loss = " << best.val << "\nbest_test_loss = " << best.test
     << "\ntest_normalized_mse = " << normalized_mse(r.model, data, Split::test) << '\n';
  return os.str();
}

void write_lobe_outputs(const ExperimentConfig& cfg, const TransitionAnalysis& ta,
                        const std::string& prefix, std::ostringstream& summary) {
  write_file_atomic(path_in(cfg, prefix + "records.csv"), records_csv(ta.records));
  summary << "transitions = " << ta.transitions.size() << "\nsojourns = " << ta.records.size() << '\n';
  if (ta.records.empty()) {
    summary << "max_sojourn_days = n/a\nfit_a = n/a\nfit_b = n/a\n";
    return;
  }
  const Histogram hist = sojourn_histogram(ta.records, cfg.bin_width_days);
  write_file_atomic(path_in(cfg, prefix + "histogram.csv"), histogram_csv(hist));
  summary << "max_sojourn_days = " << max_sojourn(ta.records) << '\n';
  try {
    const ExpFit fit = fit_exponential(hist, cfg.min_count);
    std::ostringstream f;
    f.precision(17);
    f << "a,b,t_min,t_max,bins_used,r_squared\n"
      << fit.a << ',' << fit.b << ',' << fit.t_min << ',' << fit.t_max << ',' << fit.bins_used << ','
      << fit.r_squared << '\n';
    write_file_atomic(path_in(cfg, prefix + "fit.csv"), f.str());
    summary << "fit_a = " << fit.a << "\nfit_b = " << fit.b << '\n';
  } catch (const InsufficientData&) {
    summary << "fit_a = n/a\nfit_b = n/a\n";
  }
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) != nullptr) return kExitConfig;
  if (dynamic_cast<const BlowUp*>(&e) != nullptr) return kExitBlowUp;
  if (dynamic_cast<const InsufficientData*>(&e) != nullptr) return kExitInsufficientData;
  return 1;
}

void cmd_simulate(const ExperimentConfig& cfg) {
  cfg.validate();
  const ModelParams p = cfg.model_params();
  prepare_out_dir(cfg);
  const Trajectory traj = spinup_then_record(p, default_initial_state(), cfg.spinup_days,
                                             cfg.record_days, cfg.dt_days, cfg.stride);
  save_trajectory(path_in(cfg, "trajectory.l80t"), traj);
  if (cfg.csv) save_trajectory_csv(path_in(cfg, "trajectory.csv"), traj);
  write_file_atomic(path_in(cfg, "manifest_simulate.txt"), format_experiment_config(cfg, "simulate"));
}

void cmd_train(const ExperimentConfig& cfg, ParamKind kind, const std::string& trajectory_path) {
  cfg.validate();
  const Trajectory traj = load_trajectory(trajectory_path);
  if (traj.span_days() < cfg.span_days) {
    throw InsufficientData("training span of " + std::to_string(cfg.span_days) +
                           " days exceeds the recorded span");
  }
  prepare_out_dir(cfg);
  TrainOptions opts{cfg.optimizer, cfg.span_days, cfg.row_stride};
  std::string kind_text;
  if (kind == ParamKind::slow_pair) {
    const auto res = train_slow_pair(traj, FilterSpec::from_t_gw(cfg.t_gw_days), cfg.arch, cfg.split,
                                     cfg.seed, opts);
    save_mlp(path_in(cfg, "z_net.l80n"), *res.param.z_net());
    save_mlp(path_in(cfg, "x_net.l80n"), *res.param.x_net());
    write_file_atomic(path_in(cfg, "z_net.txt"), sidecar(cfg, "Z: y -> filtered z", res.z_stage, res.z_data));
    write_file_atomic(path_in(cfg, "x_net.txt"), sidecar(cfg, "X: (y, Z(y)) -> filtered x", res.x_stage, res.x_data));
    write_file_atomic(path_in(cfg, "loss_history_z.csv"), history_csv(res.z_stage.history));
    write_file_atomic(path_in(cfg, "loss_history_x.csv"), history_csv(res.x_stage.history));
    kind_text = "slow_pair";
  } else if (kind == ParamKind::vanilla) {
    const auto res = train_vanilla(traj, cfg.arch, cfg.split, cfg.seed, opts);
    save_mlp(path_in(cfg, "v_net.l80n"), *res.param.x_net());
    write_file_atomic(path_in(cfg, "v_net.txt"), sidecar(cfg, "V: y -> x", res.stage, res.data));
    write_file_atomic(path_in(cfg, "loss_history_v.csv"), history_csv(res.stage.history));
    kind_text = "vanilla";
  } else {
    throw ConfigError("train: kind must be slow_pair or vanilla");
  }
  write_file_atomic(path_in(cfg, "parameterization.txt"), "kind = " + kind_text + "\n");
  write_file_atomic(path_in(cfg, "manifest_train.txt"),
                    format_experiment_config(cfg, "train --kind " + kind_text + " --trajectory " +
                                                      trajectory_path));
}

Parameterization load_parameterization(const std::string& model_dir) {
  const fs::path dir(model_dir);
  std::string kind;
  for (const auto& kv : parse_key_values(read_text_file((dir / "parameterization.txt").string()), false)) {
    if (kv.key != "kind") throw ConfigError("parameterization.txt: unknown key '" + kv.key + "'");
    kind = kv.value;
  }
  if (kind == "slow_pair") {
    return Parameterization::slow_pair(load_mlp((dir / "z_net.l80n").string()),
                                       load_mlp((dir / "x_net.l80n").string()));
  }
  if (kind == "vanilla") return Parameterization::vanilla(load_mlp((dir / "v_net.l80n").string()));
  if (kind == "zero") {
    return Parameterization::external("zero", [](const Vec3&) { return Vec3{0.0, 0.0, 0.0}; });
  }
  throw ConfigError("parameterization.txt: unknown kind '" + kind + "'");
}

void cmd_close(const ExperimentConfig& cfg, const std::string& model_dir,
               const std::string& truth_path) {
  cfg.validate();
  const ModelParams p = cfg.model_params();
  const Parameterization param = load_parameterization(model_dir);
  const Trajectory truth = load_trajectory(truth_path);
  truth.validate();
  prepare_out_dir(cfg);

  const std::size_t y0c = y_column(truth.n_components, 0);
  const auto last = truth.row(truth.size() - 1);
  const Vec3 y0{last[y0c], last[y0c + 1], last[y0c + 2]};

  const ClosureSystem sys{p, param};
  const ClosureRun run = run_closure_checked(sys, y0, cfg.closure_dt_days,
                                             steps_for(cfg.closure_days, cfg.closure_dt_days),
                                             cfg.closure_stride, true);
  save_trajectory(path_in(cfg, "closure.l80t"), run.trajectory);
  if (cfg.csv) save_trajectory_csv(path_in(cfg, "closure.csv"), run.trajectory);

  std::ostringstream summary;
  summary.precision(17);
  summary << "kind = " << to_string(param.kind()) << "\nsamples = " << run.trajectory.size() << '\n';
  if (run.blowup_step) summary << "blowup_step = " << *run.blowup_step << '\n';

  if (truth.n_components == 9) {
    const HfResidual r = hf_residual(truth, param);
    write_file_atomic(path_in(cfg, "residual.csv"), residual_csv(r));
    for (int j = 0; j < 3; ++j) {
      summary << "residual_mean_" << j + 1 << " = " << r.mean[j] << "\nresidual_std_" << j + 1
              << " = " << r.stddev[j] << '\n';
    }
  }

  const FrequencyBand band = FrequencyBand::gravity_wave(cfg.t_gw_days);
  const bool comparable = std::abs(truth.dt - run.trajectory.dt) <= 1e-12 * truth.dt &&
                          run.trajectory.size() >= 16 && band.f_hi <= 0.5 / truth.dt;
  if (comparable) {
    try {
      const auto ratio = spectral_deficit(truth, run.trajectory, band);
      std::ostringstream os;
      os.precision(17);
      os << "component,ratio\n";
      for (int j = 0; j < 3; ++j) {
        os << 'y' << j + 1 << ',' << ratio[j] << '\n';
        summary << "spectral_deficit_y" << j + 1 << " = " << ratio[j] << '\n';
      }
      write_file_atomic(path_in(cfg, "spectral_deficit.csv"), os.str());
    } catch (const std::invalid_argument& e) {
      summary << "spectral_deficit = n/a (" << e.what() << ")\n";
    }
  } else {
    summary << "spectral_deficit = n/a (sampling differs from the truth)\n";
  }

  write_lobe_outputs(cfg, detect_transitions(run.trajectory, LobeSpec{cfg.lobe_threshold(), 2}), "closure_", summary);
  write_file_atomic(path_in(cfg, "summary.txt"), summary.str());
  write_file_atomic(path_in(cfg, "manifest_close.txt"),
                    format_experiment_config(cfg, "close --model-dir " + model_dir +
                                                      " --trajectory " + truth_path));
  if (run.blowup_step) throw BlowUp(*run.blowup_step, "parameterization blow-up");
}

void cmd_lobes(const ExperimentConfig& cfg, const std::string& trajectory_path) {
  cfg.validate();
  const Trajectory traj = load_trajectory(trajectory_path);
  traj.validate();
  prepare_out_dir(cfg);
  std::ostringstream summary;
  summary.precision(17);
  summary << "y_b = " << cfg.lobe_threshold() << "\nbin_width_days = " << cfg.bin_width_days
          << "\nspan_days = " << traj.span_days() << '\n';
  write_lobe_outputs(cfg, detect_transitions(traj, LobeSpec{cfg.lobe_threshold(), 2}), "", summary);
  write_file_atomic(path_in(cfg, "summary.txt"), summary.str());
  write_file_atomic(path_in(cfg, "manifest_lobes.txt"),
                    format_experiment_config(cfg, "lobes --trajectory " + trajectory_path));
}

void cmd_surface(const ExperimentConfig& cfg, const std::string& model_dir, char output,
                 std::size_t component, double radius, std::size_t resolution) {
  cfg.validate();
  if (output != 'x' && output != 'z') throw ConfigError("surface output must be x or z");
  if (component < 1 || component > 3) throw ConfigError("surface component must be 1, 2 or 3");
  const Parameterization param = load_parameterization(model_dir);
  prepare_out_dir(cfg);
  const SphereGrid grid = make_sphere_grid(radius, resolution, resolution);
  const auto samples =
      sphere_level_set(param, output == 'x' ? MapOutput::x : MapOutput::z, component - 1, grid);
  const std::string name = std::string("surface_") + output + std::to_string(component) + ".csv";
  write_file_atomic(path_in(cfg, name), surface_csv(samples));
}

}  // namespace l80
