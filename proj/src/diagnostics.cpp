#include "l80/diagnostics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "l80/errors.hpp"
#include "l80/lobes.hpp"

namespace l80 {

HfResidual hf_residual(const Trajectory& traj, const Parameterization& p) {
  if (traj.n_components != 9) throw std::invalid_argument("hf_residual: need unfiltered x and y (9 components)");
  HfResidual r;
  r.t0 = traj.t0;
  r.dt = traj.dt;
  const std::size_t n = traj.size();
  if (n == 0) throw InsufficientData("hf_residual: empty trajectory");
  r.series.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = traj.row(i);
    const Vec3 x_hat = p.x_of({row[3], row[4], row[5]});
    r.series.push_back({row[0] - x_hat[0], row[1] - x_hat[1], row[2] - x_hat[2]});
  }
  for (int j = 0; j < 3; ++j) {
    double sum = 0.0;
    for (const auto& e : r.series) sum += e[j];
    r.mean[j] = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const auto& e : r.series) ss += (e[j] - r.mean[j]) * (e[j] - r.mean[j]);
    r.stddev[j] = std::sqrt(ss / static_cast<double>(n));
  }
  return r;
}

std::string residual_csv(const HfResidual& r) {
  std::ostringstream os;
  os.precision(17);
  os << "t,E1,E2,E3\n";
  for (std::size_t i = 0; i < r.series.size(); ++i) {
    const auto& e = r.series[i];
    os << r.t0 + r.dt * static_cast<double>(i) << ',' << e[0] << ',' << e[1] << ',' << e[2] << '\n';
  }
  return os.str();
}

double spectral_deficit(std::span<const double> truth, std::span<const double> closure, double dt,
                        FrequencyBand band) {
  if (!(band.f_lo >= 0.0) || !(band.f_hi > band.f_lo)) throw std::invalid_argument("spectral_deficit: empty band");
  if (band.f_hi > 0.5 / dt) throw std::invalid_argument("spectral_deficit: band outside Nyquist");
  const double truth_power = band_power(power_spectrum(truth, dt), band.f_lo, band.f_hi);
  if (!(truth_power > 0.0)) throw std::invalid_argument("spectral_deficit: truth has no power in band");
  return band_power(power_spectrum(closure, dt), band.f_lo, band.f_hi) / truth_power;
}

std::array<double, 3> spectral_deficit(const Trajectory& truth, const Trajectory& closure,
                                       FrequencyBand band) {
  const double tol = 1e-12 * truth.dt;
  if (std::abs(truth.dt - closure.dt) > tol) throw std::invalid_argument("spectral_deficit: dt mismatch");
  std::array<double, 3> out{};
  for (std::size_t j = 0; j < 3; ++j) {
    out[j] = spectral_deficit(truth.component(y_column(truth.n_components, j)),
                              closure.component(y_column(closure.n_components, j)), truth.dt, band);
  }
  return out;
}

SphereGrid make_sphere_grid(double r, std::size_t n_lat, std::size_t n_lon) {
  if (!(r >= 0.0)) throw std::invalid_argument("sphere grid: r must be >= 0");
  SphereGrid g{r, n_lat, n_lon, {}};
  if (r == 0.0) {
    g.points.push_back({0.0, 0.0, 0.0});
    return g;
  }
  if (n_lat == 0 || n_lon == 0) throw std::invalid_argument("sphere grid: zero resolution");
  g.points.reserve(n_lat * n_lon);
  for (std::size_t i = 0; i < n_lat; ++i) {
    const double cos_t = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n_lat);
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    for (std::size_t k = 0; k < n_lon; ++k) {
      const double phi = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(n_lon);
      g.points.push_back({r * sin_t * std::cos(phi), r * sin_t * std::sin(phi), r * cos_t});
    }
  }
  return g;
}

double rms_y_radius(const Trajectory& traj) {
  const std::size_t c0 = y_column(traj.n_components, 0);
  if (traj.size() == 0) throw InsufficientData("rms_y_radius: empty trajectory");
  double sum = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    for (std::size_t j = 0; j < 3; ++j) sum += traj.at(i, c0 + j) * traj.at(i, c0 + j);
  }
  return std::sqrt(sum / static_cast<double>(traj.size()));
}

std::vector<SurfaceSample> sphere_level_set(const Parameterization& p, MapOutput output,
                                            std::size_t j, const SphereGrid& grid) {
  if (j > 2) throw std::invalid_argument("sphere_level_set: component must be 0, 1 or 2");
  std::vector<SurfaceSample> out;
  out.reserve(grid.points.size());
  for (const auto& y : grid.points) {
    double value;
    if (output == MapOutput::x) {
      value = p.x_of(y)[j];
    } else {
      const auto z = p.z_of(y);
      if (!z) throw std::invalid_argument("sphere_level_set: parameterization has no z map");
      value = (*z)[j];
    }
    out.push_back({y[0], y[1], (y[2] > 0.0) - (y[2] < 0.0), value});
  }
  return out;
}

std::string surface_csv(std::span<const SurfaceSample> samples) {
  std::ostringstream os;
  os.precision(17);
  os << "y1,y2,hemisphere,value\n";
  for (const auto& s : samples) os << s.y1 << ',' << s.y2 << ',' << s.hemisphere << ',' << s.value << '\n';
  return os.str();
}

}  // namespace l80
