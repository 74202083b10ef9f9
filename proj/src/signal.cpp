#include "l80/signal.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "l80/errors.hpp"

namespace l80 {

namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::size_t FilterSpec::window_samples(double dt_days) const {
  if (!(window_days > 0.0)) throw std::invalid_argument("filter: window_days must be > 0");
  if (!(dt_days > 0.0)) throw std::invalid_argument("filter: dt must be > 0");
  const double ratio = window_days / dt_days;
  const long long half = std::llround((ratio - 1.0) / 2.0);
  return static_cast<std::size_t>(2 * std::max(half, 0LL) + 1);
}

Trajectory moving_average(const Trajectory& traj, std::size_t window) {
  if (window % 2 == 0) throw std::invalid_argument("moving_average: window must be odd");
  const std::size_t n = traj.size();
  if (window > n) throw InsufficientData("moving_average: window longer than trajectory");
  const std::size_t nc = traj.n_components;
  const std::size_t m = n - window + 1;

  Trajectory out;
  out.dt = traj.dt;
  out.t0 = traj.time(window / 2);
  out.n_components = nc;
  out.data.assign(m * nc, 0.0);
  const double inv = 1.0 / static_cast<double>(window);
  // Deviations from the centre sample are averaged so that constant
  // stretches come out bit-exact.
  for (std::size_t i = 0; i < m; ++i) {
    double* dst = out.data.data() + i * nc;
    const double* mid = traj.data.data() + (i + window / 2) * nc;
    for (std::size_t w = 0; w < window; ++w) {
      const double* src = traj.data.data() + (i + w) * nc;
      for (std::size_t c = 0; c < nc; ++c) dst[c] += src[c] - mid[c];
    }
    for (std::size_t c = 0; c < nc; ++c) dst[c] = mid[c] + dst[c] * inv;
  }
  return out;
}

Trajectory moving_average(const Trajectory& traj, const FilterSpec& spec) {
  return moving_average(traj, spec.window_samples(traj.dt));
}

Spectrum power_spectrum(std::span<const double> series, double dt) {
  const std::size_t n = series.size();
  if (n < 16) throw InsufficientData("power_spectrum: need at least 16 samples");
  if (!(dt > 0.0)) throw std::invalid_argument("power_spectrum: dt must be > 0");

  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  const std::size_t nf = n / 2 + 1;
  double* in = fftw_alloc_real(n);
  fftw_complex* out = fftw_alloc_complex(nf);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < n; ++i) in[i] = series[i] - mean;
  fftw_execute(plan);

  Spectrum s;
  s.frequency.resize(nf);
  s.power.resize(nf);
  const double nn = static_cast<double>(n);
  const double norm = 1.0 / (nn * nn);
  for (std::size_t k = 0; k < nf; ++k) {
    s.frequency[k] = static_cast<double>(k) / (nn * dt);
    const double mag2 = out[k][0] * out[k][0] + out[k][1] * out[k][1];
    const bool unpaired = k == 0 || (n % 2 == 0 && k == n / 2);
    s.power[k] = (unpaired ? 1.0 : 2.0) * mag2 * norm;
  }
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return s;
}

double band_power(const Spectrum& s, double f_lo, double f_hi) {
  double total = 0.0;
  for (std::size_t k = 0; k < s.frequency.size(); ++k) {
    if (s.frequency[k] >= f_lo && s.frequency[k] <= f_hi) total += s.power[k];
  }
  return total;
}

double estimate_t_gw(const Trajectory& traj) {
  traj.validate();
  if (traj.span_days() < 100.0) {
    throw InsufficientData("estimate_t_gw: record shorter than 100 days");
  }
  std::size_t first = 0;
  std::size_t count = traj.n_components;
  if (traj.n_components == 9) {
    count = 3;
  } else if (traj.n_components == 6) {
    first = 3;
    count = 3;
  }

  Spectrum total;
  for (std::size_t c = first; c < first + count; ++c) {
    const auto series = traj.component(c);
    Spectrum s = power_spectrum(series, traj.dt);
    if (total.power.empty()) {
      total = std::move(s);
    } else {
      for (std::size_t k = 0; k < s.power.size(); ++k) total.power[k] += s.power[k];
    }
  }

  const double variance = std::accumulate(total.power.begin(), total.power.end(), 0.0);
  double band = 0.0;
  double best = -1.0;
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < total.frequency.size(); ++k) {
    if (total.frequency[k] <= 1.0) continue;
    band += total.power[k];
    if (total.power[k] > best) {
      best = total.power[k];
      best_k = k;
    }
  }
  if (best <= 0.0 || !(band >= kGravityWaveFloor * variance)) {
    throw std::runtime_error("no gravity-wave peak");
  }
  return 1.0 / total.frequency[best_k];
}

}  // namespace l80
