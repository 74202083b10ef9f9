#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "l80/trajectory.hpp"

namespace l80 {

/// Default gravity-wave period: 500 yr spread over ~730000 periods.
inline constexpr double kDefaultTgwDays = 0.25;

/// Centered moving-average low-pass filter with a window of one gravity-wave period.
struct FilterSpec {
  double window_days = kDefaultTgwDays;
  double t_gw_days = kDefaultTgwDays;

  static FilterSpec from_t_gw(double t_gw_days) { return {t_gw_days, t_gw_days}; }

  /// window_days / dt rounded to the nearest odd integer (ties upward), at least 1.
  std::size_t window_samples(double dt_days) const;
};

/// Centered boxcar average of every component with an odd window `w`.
/// Output keeps the n - w + 1 fully covered samples; t0 moves forward by (w/2)*dt.
Trajectory moving_average(const Trajectory& traj, std::size_t window);
Trajectory moving_average(const Trajectory& traj, const FilterSpec& spec);

/// One-sided periodogram. Frequencies are k / (n dt) for k = 0..n/2.
struct Spectrum {
  std::vector<double> frequency;
  std::vector<double> power;
};

/// Mean-removed periodogram with a rectangular taper, normalized so the
/// bins sum to the variance of the series (Parseval).
Spectrum power_spectrum(std::span<const double> series, double dt);

/// Sum of bins with f_lo <= f <= f_hi.
double band_power(const Spectrum& s, double f_lo, double f_hi);

/// Period (days) of the strongest peak of the summed x-component
/// periodograms among periods shorter than one day. Throws
/// InsufficientData when the record is shorter than 100 days and
/// std::runtime_error("no gravity-wave peak") when less than
/// kGravityWaveFloor of the x variance sits in that band.
double estimate_t_gw(const Trajectory& traj);

inline constexpr double kGravityWaveFloor = 1e-2;

}  // namespace l80
