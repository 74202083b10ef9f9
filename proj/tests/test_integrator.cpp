#include <doctest.h>

#include <cmath>
#include <sstream>

#include "l80/errors.hpp"
#include "l80/integrator.hpp"
#include "l80/model.hpp"

using namespace l80;

namespace {

std::array<double, 9> end_state(const ModelParams& p, const State9& s0, double dt, double days) {
  const Trajectory t = integrate(L80Field(p), s0.v, dt, steps_for(days, dt), steps_for(days, dt));
  std::array<double, 9> out{};
  const auto last = t.row(t.size() - 1);
  std::copy(last.begin(), last.end(), out.begin());
  return out;
}

double distance(const std::array<double, 9>& a, const std::array<double, 9>& b) {
  double s = 0.0;
  for (int i = 0; i < 9; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("zero tendency keeps the initial state") {
  const std::vector<double> s0{1.5, -2.0, 0.25};
  const Trajectory t = integrate([](const double*, double* ds) { ds[0] = ds[1] = ds[2] = 0.0; }, s0,
                                 0.1, 50, 7);
  REQUIRE(t.size() == 50 / 7 + 1);
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t c = 0; c < 3; ++c) CHECK(t.at(i, c) == s0[c]);
  }
  CHECK(t.dt == doctest::Approx(0.7));
}

TEST_CASE("linear decay converges at fourth order") {
  auto decay = [](const double* s, double* ds) { ds[0] = -s[0]; };
  auto error = [&](double dt) {
    const std::uint64_t n = std::llround(1.0 / dt);
    const Trajectory t = integrate(decay, std::vector<double>{1.0}, dt, n, n);
    return std::abs(t.at(1, 0) - std::exp(-1.0));
  };
  const double e1 = error(0.01);
  const double e2 = error(0.005);
  CHECK(e1 < 1e-9);
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.02));
  // error <= C dt^4 with C measured from the coarse run
  CHECK(e2 <= (e1 / std::pow(0.01, 4)) * std::pow(0.005, 4) * 1.01);
}

TEST_CASE("step-halving on the HLF regime shows fourth order") {
  const ModelParams p = load_preset("hlf");
  const Trajectory warm = spinup_then_record(p, default_initial_state(), 20.0, 0.0, kDefaultDtDays, 1);
  State9 s0;
  std::copy(warm.data.begin(), warm.data.end(), s0.v.begin());
  const double dt = 8.0 * kDefaultDtDays;
  const auto ref = end_state(p, s0, dt / 8.0, 1.0);
  const double ratio = distance(end_state(p, s0, dt, 1.0), ref) / distance(end_state(p, s0, dt / 2.0, 1.0), ref);
  MESSAGE("step-halving ratio " << ratio);
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("reduced y-system conserves its quadratic invariant") {
  ModelParams p = load_preset("hlf");
  p.nu0 = 0.0;
  const double scale = 1.0 / p.time_unit_days;
  auto rhs = [&](const double* y, double* dy) {
    const double x[3] = {0.0, 0.0, 0.0};
    y_equation_rhs_into(y, x, p, dy);
    for (int i = 0; i < 3; ++i) dy[i] *= scale;
  };
  const std::vector<double> y0{0.4, -0.3, 0.2};
  const Trajectory t = integrate(rhs, y0, kDefaultDtDays, 100000, 1000);
  const double e0 = y_energy({y0[0], y0[1], y0[2]}, p);
  double worst = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double e = y_energy({t.at(i, 0), t.at(i, 1), t.at(i, 2)}, p);
    worst = std::max(worst, std::abs(e - e0) / e0);
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("recorded length is floor(n/stride) + 1") {
  auto rhs = [](const double* s, double* ds) { ds[0] = s[0]; };
  for (std::uint64_t n : {0u, 1u, 19u, 20u, 21u, 101u}) {
    const Trajectory t = integrate(rhs, std::vector<double>{1.0}, 1e-3, n, 20);
    CHECK(t.size() == n / 20 + 1);
  }
}

TEST_CASE("blow-up reports the step index") {
  auto explode = [](const double* s, double* ds) { ds[0] = s[0] * s[0]; };
  // ds/dt = s^2 from s0 = 1 diverges at t = 1.
  const auto res = integrate_checked(explode, std::vector<double>{1.0}, 1e-3, 5000, 10);
  REQUIRE(res.blowup_step.has_value());
  CHECK(*res.blowup_step > 900);
  CHECK(*res.blowup_step < 1010);
  CHECK(res.trajectory.size() == *res.blowup_step / 10 + 1);
  try {
    integrate(explode, std::vector<double>{1.0}, 1e-3, 5000, 10);
    FAIL("expected BlowUp");
  } catch (const BlowUp& e) {
    CHECK(e.step() == *res.blowup_step);
    CHECK(std::string(e.what()).find("at step " + std::to_string(e.step())) != std::string::npos);
  }
  auto nan_rhs = [](const double*, double* ds) { ds[0] = std::nan(""); };
  CHECK_THROWS_AS(integrate(nan_rhs, std::vector<double>{0.0}, 0.1, 3, 1), BlowUp);
}

TEST_CASE("bad arguments are rejected") {
  auto rhs = [](const double*, double* ds) { ds[0] = 0; };
  CHECK_THROWS_AS(integrate(rhs, std::vector<double>{0.0}, 0.0, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(integrate(rhs, std::vector<double>{0.0}, 0.1, 3, 0), std::invalid_argument);
  CHECK_THROWS_AS(integrate(rhs, std::vector<double>{NAN}, 0.1, 3, 1), NonFiniteState);
}

TEST_CASE("spinup_then_record") {
  const ModelParams p = load_preset("hlf");
  const State9 s0 = default_initial_state();
  SUBCASE("zero spinup equals a plain integration") {
    const Trajectory a = spinup_then_record(p, s0, 0.0, 2.0, kDefaultDtDays, 20);
    const Trajectory b = integrate(L80Field(p), s0.v, kDefaultDtDays, steps_for(2.0, kDefaultDtDays), 20);
    CHECK(a == b);
  }
  SUBCASE("zero record length gives the post-spinup state") {
    const Trajectory a = spinup_then_record(p, s0, 1.0, 0.0, kDefaultDtDays, 20);
    CHECK(a.size() == 1);
    const Trajectory b = integrate(L80Field(p), s0.v, kDefaultDtDays, steps_for(1.0, kDefaultDtDays), 1);
    for (int c = 0; c < 9; ++c) CHECK(a.at(0, c) == b.at(b.size() - 1, c));
  }
  SUBCASE("deterministic") {
    CHECK(spinup_then_record(p, s0, 1.0, 3.0, kDefaultDtDays, 20) ==
          spinup_then_record(p, s0, 1.0, 3.0, kDefaultDtDays, 20));
  }
}

TEST_CASE("trajectory formats") {
  Trajectory t{1.25, 0.5, 3, {1.0, -2.0, 1e-300, 0.1, 0.2, 0.3}};
  SUBCASE("binary round-trip is exact") {
    std::stringstream ss;
    write_trajectory(ss, t);
    CHECK(ss.str().size() == 33 + 6 * 8);
    CHECK(ss.str().substr(0, 4) == "L80T");
    CHECK(read_trajectory(ss) == t);
  }
  SUBCASE("bad magic and truncation are rejected") {
    std::stringstream bad("XXXX");
    CHECK_THROWS(read_trajectory(bad));
    std::stringstream ss;
    write_trajectory(ss, t);
    std::string s = ss.str();
    s.resize(s.size() - 3);
    std::stringstream trunc(s);
    CHECK_THROWS(read_trajectory(trunc));
  }
  SUBCASE("csv header and precision") {
    std::ostringstream os;
    write_trajectory_csv(os, t);
    const std::string out = os.str();
    CHECK(out.rfind("t,y1,y2,y3\n", 0) == 0);
    CHECK(out.find("1.75,0.10000000000000001") != std::string::npos);
    CHECK(component_names(9).front() == "x1");
    CHECK(component_names(9).back() == "z3");
  }
  SUBCASE("validation") {
    Trajectory ragged = t;
    ragged.data.pop_back();
    CHECK_THROWS_AS(ragged.validate(), std::invalid_argument);
    Trajectory nan = t;
    nan.data[1] = NAN;
    CHECK_THROWS_AS(nan.validate(), std::invalid_argument);
  }
}
