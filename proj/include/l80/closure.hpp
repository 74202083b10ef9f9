#pragma once

#include <cstdint>
#include <optional>

#include "l80/integrator.hpp"
#include "l80/model.hpp"
#include "l80/parameterization.hpp"
#include "l80/trajectory.hpp"

namespace l80 {

/// The y-equation with x replaced by a parameterization of y.
struct ClosureSystem {
  ModelParams params;
  Parameterization param_map;
};

/// y-tendency in model time units. Throws std::runtime_error
/// ("parameterization blow-up") when the map returns a non-finite x.
Vec3 closure_rhs(const Vec3& y, const ClosureSystem& sys);

struct ClosureRun {
  /// 3 components (y), or 6 (y then diagnosed x) when requested.
  Trajectory trajectory;
  std::optional<std::uint64_t> blowup_step;
};

/// RK4 on closure_rhs with dt in days; same recording convention as integrate.
ClosureRun run_closure_checked(const ClosureSystem& sys, const Vec3& y0, double dt_days,
                               std::uint64_t n_steps, std::uint64_t stride, bool emit_x = false);

/// Throws BlowUp (with step index) instead of returning a partial run.
Trajectory run_closure(const ClosureSystem& sys, const Vec3& y0, double dt_days,
                       std::uint64_t n_steps, std::uint64_t stride, bool emit_x = false);

}  // namespace l80
