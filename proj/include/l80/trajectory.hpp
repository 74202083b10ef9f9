#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace l80 {

/// Uniformly sampled multi-component time series, row-major.
///
/// Times are in days. The component layout is implied by the count:
/// 9 = full state (x, y, z), 3 = y only, 6 = y followed by a diagnosed x.
struct Trajectory {
  double t0 = 0.0;
  double dt = 1.0;
  std::size_t n_components = 9;
  std::vector<double> data;

  std::size_t size() const { return n_components == 0 ? 0 : data.size() / n_components; }
  double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
  double span_days() const { return size() == 0 ? 0.0 : dt * static_cast<double>(size() - 1); }

  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * n_components, n_components};
  }
  double at(std::size_t i, std::size_t c) const { return data[i * n_components + c]; }

  std::vector<double> component(std::size_t c) const;

  /// Rows [first, first + count); t0 shifted accordingly.
  Trajectory slice(std::size_t first, std::size_t count) const;

  /// Throws std::invalid_argument on dt <= 0, empty data, ragged rows or non-finite samples.
  void validate() const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

std::vector<std::string> component_names(std::size_t n_components);

// Binary layout, little-endian:
//   "L80T", u32 version = 1, u64 n, f64 t0, f64 dt, u8 n_components,
//   then n * n_components f64 samples row-major.
void write_trajectory(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory(std::istream& in);
void save_trajectory(const std::string& path, const Trajectory& traj);
Trajectory load_trajectory(const std::string& path);

/// Header `t,<names...>`, one row per sample, full round-trip precision.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void save_trajectory_csv(const std::string& path, const Trajectory& traj);

}  // namespace l80
