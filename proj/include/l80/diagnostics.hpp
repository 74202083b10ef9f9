#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "l80/parameterization.hpp"
#include "l80/signal.hpp"
#include "l80/trajectory.hpp"

namespace l80 {

/// E_j(t) = x_j(t) - X_j(y(t)) on unfiltered data.
struct HfResidual {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<Vec3> series;
  Vec3 mean{};
  Vec3 stddev{};
};

HfResidual hf_residual(const Trajectory& traj, const Parameterization& p);
std::string residual_csv(const HfResidual& r);

/// Closed frequency interval in cycles per day.
struct FrequencyBand {
  double f_lo = 0.0;
  double f_hi = 0.0;

  static FrequencyBand from_periods(double shortest_days, double longest_days) {
    return {1.0 / longest_days, 1.0 / shortest_days};
  }
  /// Periods 0.4 T_GW .. 2 T_GW (0.1 .. 0.5 day for T_GW = 0.25 day).
  static FrequencyBand gravity_wave(double t_gw_days = kDefaultTgwDays) {
    return from_periods(0.4 * t_gw_days, 2.0 * t_gw_days);
  }
};

/// Band power of `closure` over band power of `truth` (both mean-removed
/// periodograms normalized to variance). Throws if dt differs, the band
/// exceeds Nyquist, or the truth carries no power in the band.
double spectral_deficit(std::span<const double> truth, std::span<const double> closure, double dt,
                        FrequencyBand band);

/// Per y component, for any pair of trajectory layouts that carry y.
std::array<double, 3> spectral_deficit(const Trajectory& truth, const Trajectory& closure,
                                       FrequencyBand band);

/// Equal-area sampling of the sphere |y| = r: n_lat latitude bands with
/// cos(theta) uniform, n_lon longitudes each. r = 0 gives the single point 0.
struct SphereGrid {
  double r = 1.0;
  std::size_t n_lat = 200;
  std::size_t n_lon = 200;
  std::vector<Vec3> points;
};

SphereGrid make_sphere_grid(double r, std::size_t n_lat = 200, std::size_t n_lon = 200);

/// RMS of |y| over a trajectory (default sphere radius).
double rms_y_radius(const Trajectory& traj);

enum class MapOutput { x, z };

struct SurfaceSample {
  double y1;
  double y2;
  int hemisphere;  // sign of y3
  double value;
};

/// j-th component of the x (or z) estimate at every grid point.
std::vector<SurfaceSample> sphere_level_set(const Parameterization& p, MapOutput output,
                                            std::size_t j, const SphereGrid& grid);
std::string surface_csv(std::span<const SurfaceSample> samples);

}  // namespace l80
