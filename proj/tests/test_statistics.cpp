#include <doctest.h>

#include <cmath>
#include <random>

#include "l80/errors.hpp"
#include "l80/lobes.hpp"
#include "support.hpp"

using namespace l80;

namespace {

std::vector<SojournRecord> records_of(const std::vector<double>& durations) {
  std::vector<SojournRecord> out;
  double t = 0.0;
  for (std::size_t i = 0; i < durations.size(); ++i) {
    out.push_back({i % 2 ? Lobe::right : Lobe::left, t, t + durations[i], durations[i]});
    t += durations[i];
  }
  return out;
}

Histogram make_hist(double width, std::vector<std::size_t> counts) {
  Histogram h;
  h.bin_width = width;
  for (std::size_t k = 0; k < counts.size(); ++k) h.centers.push_back((static_cast<double>(k) + 0.5) * width);
  h.counts = std::move(counts);
  return h;
}

}  // namespace

TEST_CASE("local extrema") {
  const std::vector<double> s{0, 1, 1, 0, -1, -1, -1, 0, 2, 2};
  const auto e = local_extrema(s);
  REQUIRE(e.size() == 2);
  CHECK(e[0].index == 1);
  CHECK(e[0].is_max);
  CHECK(e[1].index == 4);
  CHECK_FALSE(e[1].is_max);
}

TEST_CASE("square wave gives equal sojourns") {
  const double dt = 0.1;
  std::vector<double> s;
  for (int i = 0; i < 1000; ++i) s.push_back((i / 100) % 2 == 0 ? 1.0 : -1.0);
  const auto res = detect_transitions(s, 0.0, dt, 0.2);
  // Extrema sit at the start of each interior plateau (samples 100..800);
  // the first and last plateaus touch the ends and do not count.
  REQUIRE(res.transitions.size() == 7);
  for (std::size_t i = 0; i < res.transitions.size(); ++i) {
    CHECK(res.transitions[i] == doctest::Approx(dt * (100.0 * static_cast<double>(i + 2) - 0.5)));
  }
  REQUIRE(res.records.size() == 6);
  for (const auto& r : res.records) CHECK(r.duration == doctest::Approx(10.0));
  CHECK(res.records[0].lobe == Lobe::right);
  CHECK(res.records[1].lobe == Lobe::left);
}

TEST_CASE("thresholds never armed") {
  std::vector<double> s;
  for (int i = 0; i < 2000; ++i) s.push_back(0.15 * std::sin(0.05 * i));
  const auto res = detect_transitions(s, 0.0, 1.0, 0.2);
  CHECK(res.transitions.empty());
  CHECK(res.records.empty());
}

TEST_CASE("brute-force state machine agrees") {
  Rng rng(77);
  std::size_t total = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = testing::synthetic_lobe_series(rng);
    const double y_b = rng.uniform(0.05, 0.5);
    const double t0 = rng.uniform(-5, 5), dt = rng.uniform(0.01, 1);
    const auto got = detect_transitions(s, t0, dt, y_b);
    const auto want = testing::brute_force_transitions(s, t0, dt, y_b);
    REQUIRE(got.transitions.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(got.transitions[i] == want[i].time);
    for (std::size_t i = 0; i + 1 < want.size(); ++i) {
      CHECK((got.records[i].lobe == Lobe::left) == want[i].into_left);
    }
    total += want.size();
  }
  CHECK(total > 1000);
}

TEST_CASE("records alternate and tile the span between transitions") {
  Rng rng(78);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = testing::synthetic_lobe_series(rng);
    const auto res = detect_transitions(s, 0.0, 0.5, 0.2);
    double sum = 0.0;
    for (std::size_t i = 0; i < res.records.size(); ++i) {
      CHECK(res.records[i].t_exit > res.records[i].t_enter);
      if (i > 0) {
        CHECK(res.records[i].lobe != res.records[i - 1].lobe);
        CHECK(res.records[i].t_enter == res.records[i - 1].t_exit);
      }
      sum += res.records[i].duration;
    }
    if (!res.records.empty()) {
      CHECK(sum == doctest::Approx(res.transitions.back() - res.transitions.front()).epsilon(1e-12));
      CHECK(res.transitions.front() >= 0.0);
      CHECK(res.transitions.back() <= 0.5 * static_cast<double>(s.size() - 1));
    }
  }
}

TEST_CASE("trajectory overload selects the y component") {
  Trajectory t{0.0, 1.0, 9, std::vector<double>(9 * 300, 0.0)};
  std::vector<double> s(300);
  for (std::size_t i = 0; i < 300; ++i) {
    s[i] = std::sin(0.1 * static_cast<double>(i));
    t.data[i * 9 + 5] = s[i];
  }
  const auto a = detect_transitions(t, LobeSpec{});
  const auto b = detect_transitions(s, 0.0, 1.0, 0.2);
  CHECK(a.transitions == b.transitions);
  CHECK(y_column(6, 2) == 2);
  CHECK_THROWS(y_column(4, 0));
  CHECK_THROWS(detect_transitions(t, LobeSpec{-1.0, 2}));
}

TEST_CASE("histogram") {
  SUBCASE("equal durations fill one bin") {
    const auto rec = records_of(std::vector<double>(12, 7.0));
    const Histogram h = sojourn_histogram(rec, 5.0);
    CHECK(h.counts == std::vector<std::size_t>{0, 12});
    CHECK(h.centers == std::vector<double>{2.5, 7.5});
  }
  SUBCASE("counts are conserved") {
    Rng rng(3);
    std::vector<double> d;
    for (int i = 0; i < 500; ++i) d.push_back(rng.uniform(0.1, 80));
    CHECK(sojourn_histogram(records_of(d), 5.0).total() == 500);
  }
  SUBCASE("exponential durations give slope -lambda") {
    std::mt19937_64 g(1);
    std::exponential_distribution<double> ex(0.05);
    std::vector<double> d;
    for (int i = 0; i < 50000; ++i) d.push_back(ex(g));
    const ExpFit fit = fit_exponential(sojourn_histogram(records_of(d), 5.0), 20);
    CHECK(fit.b == doctest::Approx(-0.05).epsilon(0.05));
  }
  SUBCASE("empty input") { CHECK_THROWS_AS(sojourn_histogram({}, 5.0), InsufficientData); }
}

TEST_CASE("exponential fit") {
  SUBCASE("exact halving counts") {
    // Integer counts that follow a e^{b t} exactly: halving every bin.
    const Histogram h = make_hist(5.0, {1024, 512, 256, 128, 64, 32, 16, 8, 4, 2, 1});
    const ExpFit fit = fit_exponential(h);
    CHECK(fit.b == doctest::Approx(-std::log(2.0) / 5.0).epsilon(1e-12));
    CHECK(fit.a == doctest::Approx(1024.0 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0));
    CHECK(fit.bins_used == 11);
  }
  SUBCASE("count scaling moves only a") {
    const Histogram h = make_hist(5.0, {90, 41, 30, 9, 0, 4, 2});
    Histogram k = h;
    for (auto& c : k.counts) c *= 3;
    const ExpFit f1 = fit_exponential(h), f3 = fit_exponential(k);
    CHECK(f3.b == doctest::Approx(f1.b).epsilon(1e-12));
    CHECK(f3.a == doctest::Approx(3.0 * f1.a).epsilon(1e-12));
    CHECK(f1.bins_used == 6);  // the empty bin is skipped
  }
  SUBCASE("time rescaling divides b") {
    const Histogram h = make_hist(5.0, {90, 41, 30, 9, 0, 4, 2});
    const Histogram s = make_hist(12.5, h.counts);
    CHECK(fit_exponential(s).b == doctest::Approx(fit_exponential(h).b / 2.5).epsilon(1e-12));
  }
  SUBCASE("minimum count restricts the bins") {
    const Histogram h = make_hist(5.0, {90, 41, 30, 9, 0, 4, 2});
    CHECK(fit_exponential(h, 5).bins_used == 4);
    CHECK_THROWS_AS(fit_exponential(h, 40), InsufficientData);
    CHECK_THROWS_AS(fit_exponential(make_hist(5.0, {3, 0, 1})), InsufficientData);
  }
}

TEST_CASE("max sojourn and csv") {
  const auto one = records_of({42.5});
  CHECK(max_sojourn(one) == 42.5);
  CHECK(max_sojourn(records_of({3, 99, 7})) == 99);
  CHECK_THROWS_AS(max_sojourn({}), InsufficientData);
  CHECK(records_csv(one) == "lobe,t_enter,t_exit,duration\nleft,0,42.5,42.5\n");
  CHECK(histogram_csv(make_hist(5.0, {2, 1})) == "bin_center,count\n2.5,2\n7.5,1\n");
}
