#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "l80/errors.hpp"
#include "l80/model.hpp"
#include "l80/trajectory.hpp"

namespace l80 {

/// Any |component| above this is treated as divergence.
inline constexpr double kBlowUpThreshold = 1e6;

struct IntegrationResult {
  Trajectory trajectory;
  /// Step (1-based) at which the state left the bounded range, if it did.
  /// The trajectory then holds every recorded sample before that step.
  std::optional<std::uint64_t> blowup_step;
};

/// Classical fixed-step RK4. `rhs(const double* s, double* ds)` writes the
/// tendency in units of 1/[dt]. Records the initial state and every
/// `stride`-th state after it, so a complete run holds
/// floor(n_steps / stride) + 1 samples.
template <class Rhs>
IntegrationResult integrate_checked(Rhs&& rhs, std::span<const double> s0, double dt,
                                    std::uint64_t n_steps, std::uint64_t stride,
                                    double t0 = 0.0) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be > 0");
  if (stride < 1) throw std::invalid_argument("integrate: stride must be >= 1");
  const std::size_t dim = s0.size();
  if (dim == 0) throw std::invalid_argument("integrate: empty state");

  IntegrationResult res;
  Trajectory& traj = res.trajectory;
  traj.t0 = t0;
  traj.dt = dt * static_cast<double>(stride);
  traj.n_components = dim;
  traj.data.reserve((n_steps / stride + 1) * dim);

  std::vector<double> s(s0.begin(), s0.end());
  for (double v : s) {
    if (!std::isfinite(v)) throw NonFiniteState();
  }
  traj.data.insert(traj.data.end(), s.begin(), s.end());

  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  const double half = 0.5 * dt;
  const double sixth = dt / 6.0;
  for (std::uint64_t step = 1; step <= n_steps; ++step) {
    rhs(s.data(), k1.data());
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = s[i] + half * k1[i];
    rhs(tmp.data(), k2.data());
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = s[i] + half * k2[i];
    rhs(tmp.data(), k3.data());
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = s[i] + dt * k3[i];
    rhs(tmp.data(), k4.data());

    bool bounded = true;
    for (std::size_t i = 0; i < dim; ++i) {
      s[i] += sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      // NaN fails the comparison as well.
      bounded &= std::abs(s[i]) <= kBlowUpThreshold;
    }
    if (!bounded) {
      res.blowup_step = step;
      return res;
    }
    if (step % stride == 0) traj.data.insert(traj.data.end(), s.begin(), s.end());
  }
  return res;
}

/// As integrate_checked, but throws BlowUp carrying the step index.
template <class Rhs>
Trajectory integrate(Rhs&& rhs, std::span<const double> s0, double dt, std::uint64_t n_steps,
                     std::uint64_t stride, double t0 = 0.0) {
  auto res = integrate_checked(std::forward<Rhs>(rhs), s0, dt, n_steps, stride, t0);
  if (res.blowup_step) throw BlowUp(*res.blowup_step);
  return std::move(res.trajectory);
}

/// Full-model tendency per day (model tendency divided by the time unit).
struct L80Field {
  ModelParams params;
  double scale;

  explicit L80Field(const ModelParams& p) : params(p), scale(1.0 / p.time_unit_days) {}

  void operator()(const double* s, double* ds) const noexcept {
    l80_rhs_into(s, params, ds);
    for (int i = 0; i < 9; ++i) ds[i] *= scale;
  }
};

/// Number of steps of size dt_days covering `days`, rounded to nearest.
std::uint64_t steps_for(double days, double dt_days);

/// Integrates the full model through `spinup_days`, discards that part and
/// records `record_days` starting from the post-spinup state (t0 = 0).
Trajectory spinup_then_record(const ModelParams& p, const State9& s0, double spinup_days,
                              double record_days, double dt_days, std::uint64_t stride);

/// Fixed documented starting point for attractor runs.
State9 default_initial_state();

/// Default 0.75 minute step, in days.
inline constexpr double kDefaultDtDays = 0.75 / 1440.0;
inline constexpr std::uint64_t kDefaultStride = 20;
inline constexpr double kDefaultSpinupDays = 100.0;

}  // namespace l80
