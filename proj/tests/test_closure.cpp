#include <doctest.h>

#include <cmath>

#include "l80/closure.hpp"
#include "l80/errors.hpp"
#include "l80/integrator.hpp"
#include "l80/rng.hpp"

using namespace l80;

namespace {

Parameterization zero_map() {
  return Parameterization::external("zero", [](const Vec3&) { return Vec3{0, 0, 0}; });
}

// x = M y + d, the map used by the term-by-term oracle.
Parameterization oracle_linear_map() {
  return Parameterization::external("linear", [](const Vec3& y) {
    return Vec3{0.25 * y[0] - 0.125 * y[1] + 1.0 / 32,
                0.0625 * y[0] + 0.5 * y[1] - 0.25 * y[2] - 1.0 / 64,
                0.375 * y[1] - 0.5 * y[2] + 1.0 / 128};
  });
}

}  // namespace

TEST_CASE("closure tendency matches the term-by-term oracle") {
  const ClosureSystem sys{load_preset("hlf"), oracle_linear_map()};
  const Vec3 y{-0.0015325546264648438, -0.06370067596435547, -0.29340457916259766};
  const Vec3 d = closure_rhs(y, sys);
  CHECK(d[0] == doctest::Approx(-0.0075609476650759797).epsilon(1e-13));
  CHECK(d[1] == doctest::Approx(-0.0084429399543058739).epsilon(1e-13));
  CHECK(d[2] == doctest::Approx(-0.11354573551673752).epsilon(1e-13));
}

TEST_CASE("true-x lookup reproduces the full-model y-tendency") {
  const ModelParams p = load_preset("hlf");
  const Trajectory t = spinup_then_record(p, default_initial_state(), 5.0, 2.0, kDefaultDtDays, 40);
  for (std::size_t i = 0; i < t.size(); i += 7) {
    State9 s;
    std::copy(t.row(i).begin(), t.row(i).end(), s.v.begin());
    const Vec3 x = s.xs();
    const ClosureSystem sys{p, Parameterization::external("lookup", [x](const Vec3&) { return x; })};
    const Vec3 d = closure_rhs(s.ys(), sys);
    const State9 full = l80_rhs(s, p);
    for (int j = 0; j < 3; ++j) CHECK(d[j] == full.y(j));
  }
}

TEST_CASE("zero map without damping conserves the quadratic invariant") {
  ModelParams p = load_preset("hlf");
  p.nu0 = 0.0;
  const ClosureSystem sys{p, zero_map()};
  const Vec3 y0{0.3, 0.5, -0.2};
  const Trajectory t = run_closure(sys, y0, kDefaultDtDays, 20000, 500);
  const double e0 = y_energy(y0, p);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(y_energy({t.at(i, 0), t.at(i, 1), t.at(i, 2)}, p) == doctest::Approx(e0).epsilon(1e-10));
  }
}

TEST_CASE("zero map with damping decays monotonically") {
  const ModelParams p = load_preset("hlf");
  const ClosureSystem sys{p, zero_map()};
  const Trajectory t = run_closure(sys, {0.3, 0.5, -0.2}, kDefaultDtDays, 40000, 100);
  double prev = 1e300;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double e = y_energy({t.at(i, 0), t.at(i, 1), t.at(i, 2)}, p);
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("diagnosed x is appended on request") {
  const ClosureSystem sys{load_preset("hlf"), oracle_linear_map()};
  const Trajectory plain = run_closure(sys, {0.1, 0.2, 0.3}, kDefaultDtDays, 400, 20);
  const Trajectory with_x = run_closure(sys, {0.1, 0.2, 0.3}, kDefaultDtDays, 400, 20, true);
  REQUIRE(plain.n_components == 3);
  REQUIRE(with_x.n_components == 6);
  REQUIRE(with_x.size() == 21);
  for (std::size_t i = 0; i < plain.size(); ++i) {
    const Vec3 y{plain.at(i, 0), plain.at(i, 1), plain.at(i, 2)};
    const Vec3 x = sys.param_map.x_of(y);
    for (int j = 0; j < 3; ++j) {
      CHECK(with_x.at(i, j) == y[j]);
      CHECK(with_x.at(i, 3 + j) == x[j]);
    }
  }
}

TEST_CASE("runs are deterministic and storage-independent") {
  MlpParams net = init_mlp(3, 3, {1, 20}, 17);
  net.out_scale.setConstant(0.05);
  const ClosureSystem a{load_preset("hlf"), Parameterization::vanilla(net)};
  MlpParams copy = zero_mlp(3, 3, {1, 20});
  unpack_parameters(copy, pack_parameters(net));
  copy.out_scale = net.out_scale;
  const ClosureSystem b{load_preset("hlf"), Parameterization::vanilla(copy)};
  const ClosureSystem c{load_preset("hlf"), Parameterization::external("wrapped", [net](const Vec3& y) {
                          const auto out = mlp_forward(net, y);
                          return Vec3{out[0], out[1], out[2]};
                        })};
  const Vec3 y0{0.4, -0.1, 0.2};
  const Trajectory ta = run_closure(a, y0, kDefaultDtDays, 3000, 30);
  CHECK(ta == run_closure(a, y0, kDefaultDtDays, 3000, 30));
  CHECK(ta == run_closure(b, y0, kDefaultDtDays, 3000, 30));
  CHECK(ta == run_closure(c, y0, kDefaultDtDays, 3000, 30));
}

TEST_CASE("blow-ups are reported") {
  const ModelParams p = load_preset("hlf");
  SUBCASE("non-finite map output") {
    const ClosureSystem sys{p, Parameterization::external("nan", [](const Vec3&) { return Vec3{NAN, 0, 0}; })};
    CHECK_THROWS_WITH(closure_rhs({0.1, 0.1, 0.1}, sys), "parameterization blow-up");
    try {
      run_closure(sys, {0.1, 0.1, 0.1}, kDefaultDtDays, 10, 1);
      FAIL("expected BlowUp");
    } catch (const BlowUp& e) {
      CHECK(e.step() == 1);
      CHECK(std::string(e.what()).find("parameterization blow-up") != std::string::npos);
    }
  }
  SUBCASE("runaway growth keeps the partial run") {
    const ClosureSystem sys{p, Parameterization::external("pump", [](const Vec3& y) {
                              return Vec3{1e3 * y[0], 1e3 * y[1], 1e3 * y[2]};
                            })};
    const ClosureRun run = run_closure_checked(sys, {0.3, 0.3, 0.3}, kDefaultDtDays, 200000, 10);
    REQUIRE(run.blowup_step.has_value());
    CHECK(run.trajectory.size() == *run.blowup_step / 10 + 1);
  }
  SUBCASE("non-finite start") {
    const ClosureSystem sys{p, zero_map()};
    CHECK_THROWS_AS(closure_rhs({NAN, 0, 0}, sys), NonFiniteState);
  }
}
