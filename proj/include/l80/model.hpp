#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "l80/errors.hpp"

namespace l80 {

using Vec3 = std::array<double, 3>;

/// Coefficients of the nine-variable Lorenz (1980) truncation.
///
/// `time_unit_days` is the length of one nondimensional model time unit
/// expressed in days (the `dt_model_days` key of a preset file). All
/// integrations are parameterized in days and converted through it.
struct ModelParams {
  Vec3 a{};
  Vec3 b{};
  double c = 0.0;
  double nu0 = 0.0;
  double kappa0 = 0.0;
  double g0 = 0.0;
  Vec3 F{};
  Vec3 h{};
  double time_unit_days = 1.0;

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
};

/// Flat layout (x1,x2,x3,y1,y2,y3,z1,z2,z3).
struct State9 {
  std::array<double, 9> v{};

  double& x(int i) { return v[i]; }
  double& y(int i) { return v[3 + i]; }
  double& z(int i) { return v[6 + i]; }
  double x(int i) const { return v[i]; }
  double y(int i) const { return v[3 + i]; }
  double z(int i) const { return v[6 + i]; }

  Vec3 xs() const { return {v[0], v[1], v[2]}; }
  Vec3 ys() const { return {v[3], v[4], v[5]}; }
  Vec3 zs() const { return {v[6], v[7], v[8]}; }

  bool finite() const;
  friend bool operator==(const State9&, const State9&) = default;
};

struct CyclicTriple {
  int i, j, k;
};

/// (1,2,3), (2,3,1), (3,1,2) in zero-based form.
inline constexpr std::array<CyclicTriple, 3> kCyclicTriples{
    CyclicTriple{0, 1, 2}, CyclicTriple{1, 2, 0}, CyclicTriple{2, 0, 1}};

/// Tendency d/dt of the full model, in model time units.
State9 l80_rhs(const State9& s, const ModelParams& p);

/// Raw-pointer kernel shared by l80_rhs and the integrators; no finiteness check.
void l80_rhs_into(const double* s, const ModelParams& p, double* out) noexcept;

/// y-tendency with the divergent amplitudes `x` supplied externally.
Vec3 y_equation_rhs(const Vec3& y, const Vec3& x, const ModelParams& p);
void y_equation_rhs_into(const double* y, const double* x, const ModelParams& p,
                         double* out) noexcept;

/// Energy-like quadratic invariant sum_i a_i y_i^2 of the reduced y-system.
double y_energy(const Vec3& y, const ModelParams& p);

// Preset files: flat key=value, '#' comments, unknown keys rejected.
ModelParams parse_params(std::string_view text);
ModelParams load_params(const std::filesystem::path& file);
std::string format_params(const ModelParams& p);

/// Directory searched for named presets: $L80_PRESET_DIR, else the
/// config/presets directory of the source tree.
std::filesystem::path preset_dir();

/// Named regime preset, "hlf" (F1 = 0.3027) or "slow" (F1 = 6.97e-2).
ModelParams load_preset(std::string_view name);

}  // namespace l80
