#include "l80/experiment.hpp"

#include <functional>
#include <map>
#include <sstream>

#include "l80/errors.hpp"
#include "l80/kv.hpp"

namespace l80 {

namespace {

using Setter = std::function<void(ExperimentConfig&, const KeyValue&)>;

std::uint64_t parse_count(const KeyValue& kv) {
  const long long v = parse_integer(kv);
  if (v < 0) throw ConfigError("line " + std::to_string(kv.line) + ": '" + kv.key + "' must be >= 0");
  return static_cast<std::uint64_t>(v);
}

bool parse_bool(const KeyValue& kv) {
  if (kv.value == "true" || kv.value == "1") return true;
  if (kv.value == "false" || kv.value == "0") return false;
  throw ConfigError("line " + std::to_string(kv.line) + ": '" + kv.key + "' expects true/false");
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"model.regime", [](auto& c, const auto& kv) { c.regime = kv.value; }},
      {"model.params_file", [](auto& c, const auto& kv) { c.params_file = kv.value; }},
      {"integration.spinup_days", [](auto& c, const auto& kv) { c.spinup_days = parse_double(kv); }},
      {"integration.record_days", [](auto& c, const auto& kv) { c.record_days = parse_double(kv); }},
      {"integration.dt_days", [](auto& c, const auto& kv) { c.dt_days = parse_double(kv); }},
      {"integration.stride", [](auto& c, const auto& kv) { c.stride = parse_count(kv); }},
      {"filter.t_gw_days", [](auto& c, const auto& kv) { c.t_gw_days = parse_double(kv); }},
      {"training.arch", [](auto& c, const auto& kv) { c.arch = Architecture::parse(kv.value); }},
      {"training.split", [](auto& c, const auto& kv) { c.split = parse_split_mode(kv.value); }},
      {"training.seed", [](auto& c, const auto& kv) { c.seed = parse_count(kv); }},
      {"training.span_days", [](auto& c, const auto& kv) { c.span_days = parse_double(kv); }},
      {"training.row_stride", [](auto& c, const auto& kv) { c.row_stride = parse_count(kv); }},
      {"training.epochs", [](auto& c, const auto& kv) { c.optimizer.epochs = parse_count(kv); }},
      {"training.learning_rate",
       [](auto& c, const auto& kv) { c.optimizer.learning_rate = parse_double(kv); }},
      {"training.beta1", [](auto& c, const auto& kv) { c.optimizer.beta1 = parse_double(kv); }},
      {"training.beta2", [](auto& c, const auto& kv) { c.optimizer.beta2 = parse_double(kv); }},
      {"training.epsilon", [](auto& c, const auto& kv) { c.optimizer.epsilon = parse_double(kv); }},
      {"closure.days", [](auto& c, const auto& kv) { c.closure_days = parse_double(kv); }},
      {"closure.dt_days", [](auto& c, const auto& kv) { c.closure_dt_days = parse_double(kv); }},
      {"closure.stride", [](auto& c, const auto& kv) { c.closure_stride = parse_count(kv); }},
      {"lobes.y_b", [](auto& c, const auto& kv) { c.y_b = parse_double(kv); }},
      {"lobes.bin_width_days", [](auto& c, const auto& kv) { c.bin_width_days = parse_double(kv); }},
      {"lobes.min_count", [](auto& c, const auto& kv) { c.min_count = parse_count(kv); }},
      {"output.dir", [](auto& c, const auto& kv) { c.out_dir = kv.value; }},
      {"output.csv", [](auto& c, const auto& kv) { c.csv = parse_bool(kv); }},
      // Provenance written into manifests; informational on input.
      {"run.command", [](auto&, const auto&) {}},
      {"run.version", [](auto&, const auto&) {}},
  };
  return table;
}

}  // namespace

ModelParams ExperimentConfig::model_params() const {
  if (!params_file.empty()) return load_params(params_file);
  return load_preset(regime);
}

double ExperimentConfig::lobe_threshold() const {
  if (y_b) return *y_b;
  return regime == "slow" ? 0.05 : 0.2;
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(params_file.empty() ? (regime == "hlf" || regime == "slow") : true,
          "regime must be 'hlf' or 'slow', got '" + regime + "'");
  require(spinup_days >= 0.0, "integration.spinup_days must be >= 0");
  require(record_days >= 0.0, "integration.record_days must be >= 0");
  require(dt_days > 0.0, "integration.dt_days must be > 0");
  require(stride >= 1, "integration.stride must be >= 1");
  require(t_gw_days > 0.0, "filter.t_gw_days must be > 0");
  require(span_days > 0.0, "training.span_days must be > 0");
  require(row_stride >= 1, "training.row_stride must be >= 1");
  require(optimizer.epochs >= 1, "training.epochs must be >= 1");
  require(optimizer.learning_rate > 0.0, "training.learning_rate must be > 0");
  require(closure_days >= 0.0, "closure.days must be >= 0");
  require(closure_dt_days > 0.0, "closure.dt_days must be > 0");
  require(closure_stride >= 1, "closure.stride must be >= 1");
  require(!y_b || *y_b > 0.0, "lobes.y_b must be > 0");
  require(bin_width_days > 0.0, "lobes.bin_width_days must be > 0");
  require(!out_dir.empty(), "output.dir must not be empty");
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig cfg;
  for (const auto& kv : parse_key_values(text, true)) {
    const std::string full = kv.section + "." + kv.key;
    const auto it = setters().find(full);
    if (it == setters().end()) {
      throw ConfigError("line " + std::to_string(kv.line) + ": unknown key '" + full + "'");
    }
    it->second(cfg, kv);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  try {
    return parse_experiment_config(read_text_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string format_experiment_config(const ExperimentConfig& c, const std::string& command) {
  std::ostringstream os;
  os.precision(17);
  if (!command.empty()) {
    os << "[run]\ncommand = " << command << "\nversion = " << kVersionString << "\n\n";
  }
  os << "[model]\nregime = " << c.regime << '\n';
  if (!c.params_file.empty()) os << "params_file = " << c.params_file << '\n';
  os << "\n[integration]\nspinup_days = " << c.spinup_days << "\nrecord_days = " << c.record_days
     << "\ndt_days = " << c.dt_days << "\nstride = " << c.stride << '\n';
  os << "\n[filter]\nt_gw_days = " << c.t_gw_days << '\n';
  os << "\n[training]\narch = " << c.arch.str() << "\nsplit = " << to_string(c.split)
     << "\nseed = " << c.seed << "\nspan_days = " << c.span_days << "\nrow_stride = " << c.row_stride
     << "\nepochs = " << c.optimizer.epochs << "\nlearning_rate = " << c.optimizer.learning_rate
     << "\nbeta1 = " << c.optimizer.beta1 << "\nbeta2 = " << c.optimizer.beta2
     << "\nepsilon = " << c.optimizer.epsilon << '\n';
  os << "\n[closure]\ndays = " << c.closure_days << "\ndt_days = " << c.closure_dt_days
     << "\nstride = " << c.closure_stride << '\n';
  os << "\n[lobes]\ny_b = " << c.lobe_threshold() << "\nbin_width_days = " << c.bin_width_days
     << "\nmin_count = " << c.min_count << '\n';
  os << "\n[output]\ndir = " << c.out_dir << "\ncsv = " << (c.csv ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace l80
