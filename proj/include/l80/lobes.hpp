#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "l80/trajectory.hpp"

namespace l80 {

/// Lobe thresholds y_a = -y_b < 0 < y_b on one y component (default y3).
struct LobeSpec {
  double y_b = 0.2;
  std::size_t y_index = 2;

  void validate() const;
};

enum class Lobe { left, right };

std::string to_string(Lobe lobe);

struct SojournRecord {
  Lobe lobe;
  double t_enter;
  double t_exit;
  double duration;
};

struct TransitionAnalysis {
  std::vector<double> transitions;     // days
  std::vector<SojournRecord> records;  // complete sojourns between consecutive transitions
};

/// Local extremum of a sampled series: strict rise into the sample, then a
/// (possibly flat) run that ends with a strict fall (max) or rise (min).
/// Plateaus resolve to their first sample; the end points never qualify.
struct Extremum {
  std::size_t index;
  bool is_max;
};
std::vector<Extremum> local_extrema(std::span<const double> series);

/// Lobe transitions: qualifying extrema are maxima above y_b and minima
/// below -y_b. Each max immediately followed by a min (or vice versa) marks
/// one transition at the first zero crossing between them, linearly
/// interpolated between the bracketing samples. Fewer than two qualifying
/// extrema give an empty result.
TransitionAnalysis detect_transitions(std::span<const double> series, double t0, double dt,
                                      double y_b);

/// Same, on the y component selected by `spec` (full-state, y-only or
/// y-plus-diagnosed-x layouts).
TransitionAnalysis detect_transitions(const Trajectory& traj, const LobeSpec& spec);

/// Column of y_{index+1} in a trajectory with the given layout.
std::size_t y_column(std::size_t n_components, std::size_t y_index);

struct Histogram {
  double bin_width = 0.0;
  std::vector<double> centers;
  std::vector<std::size_t> counts;

  std::size_t total() const;
};

inline constexpr double kDefaultBinWidthDays = 5.0;

/// Bins [k w, (k+1) w) from zero; both lobes pooled.
Histogram sojourn_histogram(std::span<const SojournRecord> records, double bin_width_days);

/// f(t) = a exp(b t) fitted by least squares of log(count) on bin centres.
struct ExpFit {
  double a = 0.0;
  double b = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  std::size_t bins_used = 0;
  double r_squared = 0.0;
};

/// Uses every bin with count >= max(1, min_count); needs at least three.
ExpFit fit_exponential(const Histogram& hist, std::size_t min_count = 1);

double max_sojourn(std::span<const SojournRecord> records);

std::string records_csv(std::span<const SojournRecord> records);
std::string histogram_csv(const Histogram& hist);

}  // namespace l80
