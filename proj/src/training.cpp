#include "l80/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "l80/errors.hpp"
#include "l80/rng.hpp"

namespace l80 {

namespace {

Eigen::VectorXd safe_scale(const Eigen::VectorXd& s) {
  return s.unaryExpr([](double v) { return v > 0.0 ? v : 1.0; });
}

void fit_normalization(const Eigen::MatrixXd& rows, Eigen::VectorXd& shift, Eigen::VectorXd& scale) {
  shift = rows.colwise().mean().transpose();
  scale = safe_scale((rows.rowwise() - shift.transpose()).cwiseAbs().colwise().maxCoeff().transpose());
}

double mean_sq(const MlpParams& core, const Eigen::MatrixXd& in, const Eigen::MatrixXd& target) {
  if (in.rows() == 0) return 0.0;
  return mlp_loss(core, in, target) / static_cast<double>(in.rows());
}

}  // namespace

void Dataset::validate() const {
  if (inputs.rows() != targets.rows()) throw std::invalid_argument("dataset: row count mismatch");
  if (times.size() != size()) throw std::invalid_argument("dataset: time stamp count mismatch");
  if (!labels.empty() && labels.size() != size()) throw std::invalid_argument("dataset: label count mismatch");
}

std::size_t Dataset::count(Split which) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), which));
}

Dataset Dataset::subset(Split which) const {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == which) idx.push_back(static_cast<Eigen::Index>(i));
  }
  Dataset out;
  out.inputs = inputs(idx, Eigen::all);
  out.targets = targets(idx, Eigen::all);
  for (auto i : idx) out.times.push_back(times[static_cast<std::size_t>(i)]);
  out.labels.assign(idx.size(), which);
  return out;
}

SplitMode parse_split_mode(const std::string& text) {
  if (text == "random") return SplitMode::random;
  if (text == "predefined") return SplitMode::predefined;
  throw ConfigError("split must be 'random' or 'predefined', got '" + text + "'");
}

std::string to_string(SplitMode mode) { return mode == SplitMode::random ? "random" : "predefined"; }

Dataset split_dataset(Dataset ds, SplitMode mode, std::uint64_t seed) {
  ds.validate();
  const std::size_t n = ds.size();
  if (n < 10) throw InsufficientData("split_dataset: need at least 10 rows");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (mode == SplitMode::random) {
    Rng rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  } else {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return ds.times[a] < ds.times[b]; });
  }
  const auto n_train = static_cast<std::size_t>(std::llround(kTrainFraction * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::llround(kValFraction * static_cast<double>(n)));
  ds.labels.assign(n, Split::test);
  for (std::size_t r = 0; r < n_train + n_val && r < n; ++r) {
    ds.labels[order[r]] = r < n_train ? Split::train : Split::val;
  }
  return ds;
}

TrainResult train(const MlpParams& m0, const Dataset& ds, const OptimizerConfig& opt) {
  ds.validate();
  if (ds.labels.size() != ds.size()) throw std::invalid_argument("train: dataset is not split");
  if (opt.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (static_cast<std::size_t>(ds.inputs.cols()) != m0.in_dim ||
      static_cast<std::size_t>(ds.targets.cols()) != m0.out_dim) {
    throw std::invalid_argument("train: dataset dimensions do not match the network");
  }
  const Dataset tr = ds.subset(Split::train);
  const Dataset va = ds.subset(Split::val);
  const Dataset te = ds.subset(Split::test);
  if (tr.size() == 0) throw InsufficientData("train: empty training split");

  MlpParams model = m0;
  fit_normalization(tr.inputs, model.in_shift, model.in_scale);
  fit_normalization(tr.targets, model.out_shift, model.out_scale);

  // The core network sees normalized targets; normalizations are constants.
  MlpParams core = model;
  core.out_shift.setZero();
  core.out_scale.setOnes();
  auto norm_targets = [&](const Eigen::MatrixXd& t) -> Eigen::MatrixXd {
    return ((t.rowwise() - model.out_shift.transpose()).array().rowwise() /
            model.out_scale.transpose().array())
        .matrix();
  };
  const Eigen::MatrixXd tr_t = norm_targets(tr.targets);
  const Eigen::MatrixXd va_t = norm_targets(va.targets);
  const Eigen::MatrixXd te_t = norm_targets(te.targets);
  const double n_tr = static_cast<double>(tr.size());

  std::vector<double> theta = pack_parameters(core);
  std::vector<double> m1(theta.size(), 0.0), m2(theta.size(), 0.0);
  std::vector<double> best_theta = theta;
  double best_val = std::numeric_limits<double>::infinity();

  TrainResult res;
  res.history.reserve(opt.epochs);
  double b1t = 1.0, b2t = 1.0;
  for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
    unpack_parameters(core, theta);
    const LossGradient lg = mlp_gradient(core, tr.inputs, tr_t);
    EpochLoss e{lg.loss / n_tr, mean_sq(core, va.inputs, va_t), mean_sq(core, te.inputs, te_t)};
    res.history.push_back(e);
    if (!std::isfinite(e.train) || !std::isfinite(e.val) || !std::isfinite(e.test)) {
      throw TrainingDiverged(epoch, std::move(res.history));
    }
    // An empty validation split falls back to the training loss.
    const double monitor = va.size() > 0 ? e.val : e.train;
    if (monitor < best_val) {
      best_val = monitor;
      best_theta = theta;
      res.best_epoch = epoch;
    }

    b1t *= opt.beta1;
    b2t *= opt.beta2;
    const double step = opt.learning_rate * std::sqrt(1.0 - b2t) / (1.0 - b1t);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double g = lg.gradient[i];
      m1[i] = opt.beta1 * m1[i] + (1.0 - opt.beta1) * g;
      m2[i] = opt.beta2 * m2[i] + (1.0 - opt.beta2) * g * g;
      theta[i] -= step * m1[i] / (std::sqrt(m2[i]) + opt.epsilon * std::sqrt(1.0 - b2t));
    }
  }

  unpack_parameters(model, best_theta);
  res.model = std::move(model);
  return res;
}

double normalized_mse(const MlpParams& m, const Dataset& ds, Split which) {
  const Dataset part = ds.subset(which);
  if (part.size() == 0) throw InsufficientData("normalized_mse: empty split");
  const Eigen::MatrixXd pred = mlp_forward_batch(m, part.inputs);
  const double sse = (pred - part.targets).squaredNorm();
  const Eigen::MatrixXd centered = part.targets.rowwise() - part.targets.colwise().mean();
  const double sst = centered.squaredNorm();
  if (!(sst > 0.0)) throw std::invalid_argument("normalized_mse: constant targets");
  return sse / sst;
}

}  // namespace l80
