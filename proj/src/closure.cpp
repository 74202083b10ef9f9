#include "l80/closure.hpp"

#include <cmath>
#include <stdexcept>

namespace l80 {

namespace {

class ParameterizationBlowUp : public std::runtime_error {
 public:
  ParameterizationBlowUp() : std::runtime_error("parameterization blow-up") {}
};

bool finite3(const Vec3& v) {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

}  // namespace

Vec3 closure_rhs(const Vec3& y, const ClosureSystem& sys) {
  if (!finite3(y)) throw NonFiniteState();
  const Vec3 x = sys.param_map.x_of(y);
  if (!finite3(x)) throw ParameterizationBlowUp();
  Vec3 d;
  y_equation_rhs_into(y.data(), x.data(), sys.params, d.data());
  return d;
}

ClosureRun run_closure_checked(const ClosureSystem& sys, const Vec3& y0, double dt_days,
                               std::uint64_t n_steps, std::uint64_t stride, bool emit_x) {
  sys.params.validate();
  const double scale = 1.0 / sys.params.time_unit_days;
  // A non-finite x propagates into the state and is caught by the bound check.
  auto field = [&](const double* y, double* dy) {
    const Vec3 x = sys.param_map.x_of({y[0], y[1], y[2]});
    y_equation_rhs_into(y, x.data(), sys.params, dy);
    for (int i = 0; i < 3; ++i) dy[i] *= scale;
  };
  IntegrationResult res = integrate_checked(field, y0, dt_days, n_steps, stride);

  ClosureRun run;
  run.blowup_step = res.blowup_step;
  if (!emit_x) {
    run.trajectory = std::move(res.trajectory);
    return run;
  }
  const Trajectory& ys = res.trajectory;
  Trajectory& out = run.trajectory;
  out.t0 = ys.t0;
  out.dt = ys.dt;
  out.n_components = 6;
  out.data.reserve(ys.size() * 6);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const auto r = ys.row(i);
    const Vec3 y{r[0], r[1], r[2]};
    const Vec3 x = sys.param_map.x_of(y);
    out.data.insert(out.data.end(), y.begin(), y.end());
    out.data.insert(out.data.end(), x.begin(), x.end());
  }
  return run;
}

Trajectory run_closure(const ClosureSystem& sys, const Vec3& y0, double dt_days,
                       std::uint64_t n_steps, std::uint64_t stride, bool emit_x) {
  ClosureRun run = run_closure_checked(sys, y0, dt_days, n_steps, stride, emit_x);
  if (run.blowup_step) throw BlowUp(*run.blowup_step, "parameterization blow-up");
  return std::move(run.trajectory);
}

}  // namespace l80
