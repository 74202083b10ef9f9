#pragma once

// Independent oracles shared by the unit tests and the acceptance binary.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "l80/mlp.hpp"
#include "l80/rng.hpp"

namespace l80::testing {

struct RandomNet {
  MlpParams model;
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd targets;
};

/// Small net with random weights, biases and normalizations plus a batch.
inline RandomNet random_net(Rng& rng) {
  const std::size_t in = 1 + rng.below(4), out = 1 + rng.below(3);
  const Architecture arch{1 + rng.below(3), 1 + rng.below(6)};
  RandomNet r{init_mlp(in, out, arch, rng.below(1u << 30)), {}, {}};
  for (auto& layer : r.model.layers) {
    for (Eigen::Index i = 0; i < layer.b.size(); ++i) layer.b(i) = rng.uniform(-0.5, 0.5);
  }
  for (std::size_t i = 0; i < in; ++i) {
    r.model.in_shift(i) = rng.uniform(-1, 1);
    r.model.in_scale(i) = rng.uniform(0.5, 2);
  }
  for (std::size_t i = 0; i < out; ++i) {
    r.model.out_shift(i) = rng.uniform(-1, 1);
    r.model.out_scale(i) = rng.uniform(0.5, 2);
  }
  const std::size_t rows = 1 + rng.below(8);
  r.inputs.resize(rows, in);
  r.targets.resize(rows, out);
  for (Eigen::Index i = 0; i < r.inputs.size(); ++i) r.inputs.data()[i] = rng.uniform(-2, 2);
  for (Eigen::Index i = 0; i < r.targets.size(); ++i) r.targets.data()[i] = rng.uniform(-2, 2);
  return r;
}

/// Worst relative disagreement between the analytic gradient and central
/// differences with step h. Entries whose gradient is negligible against the
/// largest one are compared on that scale instead.
inline double gradient_check(const RandomNet& r, double h = 1e-6) {
  const LossGradient lg = mlp_gradient(r.model, r.inputs, r.targets);
  std::vector<double> theta = pack_parameters(r.model);
  double g_max = 0.0;
  for (double g : lg.gradient) g_max = std::max(g_max, std::abs(g));
  MlpParams probe = r.model;
  double worst = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double keep = theta[k];
    theta[k] = keep + h;
    unpack_parameters(probe, theta);
    const double up = mlp_loss(probe, r.inputs, r.targets);
    theta[k] = keep - h;
    unpack_parameters(probe, theta);
    const double down = mlp_loss(probe, r.inputs, r.targets);
    theta[k] = keep;
    const double fd = (up - down) / (2.0 * h);
    const double scale = std::max({std::abs(fd), std::abs(lg.gradient[k]), 1e-3 * g_max, 1e-12});
    worst = std::max(worst, std::abs(fd - lg.gradient[k]) / scale);
  }
  return worst;
}

struct OracleTransition {
  double time;
  bool into_left;
};

/// Sample-by-sample state machine. A sample is a maximum when it rises from
/// its predecessor and the next differing sample is lower (minimum alike).
/// Arming a new extremum resets the search for the first sign change after it.
inline std::vector<OracleTransition> brute_force_transitions(const std::vector<double>& s, double t0, double dt,
                                                             double y_b) {
  enum class State { idle, after_max, after_min } state = State::idle;
  std::vector<OracleTransition> out;
  long crossing = -1;  // first sample of the opposite sign since arming
  const std::size_t n = s.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (state == State::after_max && crossing < 0 && s[i] < 0.0) crossing = static_cast<long>(i);
    if (state == State::after_min && crossing < 0 && s[i] > 0.0) crossing = static_cast<long>(i);
    if (i + 1 >= n) break;
    std::size_t next = i + 1;
    while (next < n && s[next] == s[i]) ++next;
    if (next >= n) continue;
    const bool is_max = s[i - 1] < s[i] && s[next] < s[i];
    const bool is_min = s[i - 1] > s[i] && s[next] > s[i];
    const bool armed_max = is_max && s[i] > y_b;
    const bool armed_min = is_min && s[i] < -y_b;
    if (!armed_max && !armed_min) continue;
    if ((armed_min && state == State::after_max) || (armed_max && state == State::after_min)) {
      const auto k = static_cast<std::size_t>(crossing);
      const double frac = s[k - 1] == s[k] ? 0.0 : s[k - 1] / (s[k - 1] - s[k]);
      out.push_back({t0 + dt * (static_cast<double>(k - 1) + frac), state == State::after_max});
    }
    state = armed_max ? State::after_max : State::after_min;
    crossing = -1;
  }
  return out;
}

/// Smooth random series with occasional quantized plateaus and exact zeros.
inline std::vector<double> synthetic_lobe_series(Rng& rng) {
  const std::size_t n = 200 + rng.below(800);
  const int modes = 1 + static_cast<int>(rng.below(4));
  std::vector<double> amp(modes), freq(modes), phase(modes);
  for (int m = 0; m < modes; ++m) {
    amp[m] = rng.uniform(0.05, 0.8);
    freq[m] = rng.uniform(0.002, 0.08);
    phase[m] = rng.uniform(0, 2 * std::numbers::pi);
  }
  const double noise = rng.uniform(0.0, 0.05);
  const bool quantize = rng.below(3) == 0;
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = rng.uniform(-noise, noise);
    for (int m = 0; m < modes; ++m) v += amp[m] * std::sin(2 * std::numbers::pi * freq[m] * static_cast<double>(i) + phase[m]);
    if (quantize) v = std::round(v * 20.0) / 20.0;
    s[i] = v;
  }
  return s;
}

}  // namespace l80::testing
