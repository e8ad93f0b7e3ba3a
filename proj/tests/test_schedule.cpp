#include "doctest.h"

#include "rdsync/config.hpp"
#include "rdsync/schedule.hpp"

#include <sstream>

using namespace rdsync;

namespace {

IntermittentSchedule static_schedule() { return preset_static().build_schedule(); }
IntermittentSchedule adaptive_schedule() { return preset_adaptive().build_schedule(); }

}  // namespace

TEST_CASE("theta and omega of the bundled schedules") {
  auto s = theta_omega(static_schedule());
  CHECK(s.theta == doctest::Approx(4.9).epsilon(1e-12));
  CHECK(s.omega == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(s.usable);

  auto a = theta_omega(adaptive_schedule());
  CHECK(a.theta == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(a.omega == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("always-on single span is flagged") {
  IntermittentSchedule s({{0, 10}}, 10);
  auto to = theta_omega(s);
  CHECK(to.theta == 10);
  CHECK(to.omega == 10);
  CHECK_FALSE(to.usable);
  CHECK(rho_star(s) == 0.0);
}

TEST_CASE("empty schedule has no spans") {
  CHECK_THROWS_WITH_AS(theta_omega(IntermittentSchedule{}), "schedule: no spans", Error);
}

TEST_CASE("rho_star") {
  CHECK(rho_star(static_schedule()) == doctest::Approx(0.02).epsilon(1e-9));
  CHECK(rho_star(adaptive_schedule()) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("in_control") {
  auto s = static_schedule();
  CHECK_FALSE(s.in_control(4.95));
  CHECK(s.in_control(0.0));
  CHECK(s.in_control(4.9));
  CHECK(s.in_control(5.0));
  CHECK_FALSE(adaptive_schedule().in_control(4.0));
  CHECK_THROWS_AS(s.in_control(-0.1), Error);
  CHECK_THROWS_AS(s.in_control(s.horizon() + 1.0), Error);
}

TEST_CASE("bundled schedules extend past their listed spans") {
  auto s = static_schedule();
  CHECK(s.horizon() >= 100.0);
  REQUIRE(s.spans().size() > 11);
  CHECK(s.spans()[0] == ControlSpan{0, 4.9});
  CHECK(s.spans()[1] == ControlSpan{5, 9.92});
  CHECK(s.spans()[11].start == doctest::Approx(54.78));
}

TEST_CASE("small delay condition") {
  CHECK(small_delay_ok(adaptive_schedule(), 1.3));
  CHECK(small_delay_ok(static_schedule(), 1.3));
  auto s = adaptive_schedule();
  CHECK_FALSE(small_delay_ok(s, theta_omega(s).theta));
}

TEST_CASE("pointwise rest proportion") {
  auto s = adaptive_schedule();
  CHECK(s.rest_proportion(2.0) == 0.0);
  CHECK(s.rest_proportion(5.0) == doctest::Approx(0.0));  // next span starts
  CHECK(s.rest_proportion(4.0) == doctest::Approx(0.25));
}

TEST_CASE("random generator") {
  SUBCASE("postcondition on the generated summary") {
    auto s = generate_random(4.9, 5, 50, 1);
    auto to = theta_omega(s);
    CHECK(to.theta >= 4.9);
    CHECK(to.theta < 5.0);
    CHECK(to.omega <= 5.0);
    CHECK(s.horizon() >= 50);
  }
  SUBCASE("deterministic in the seed") {
    CHECK(generate_random(3, 5, 50, 7) == generate_random(3, 5, 50, 7));
    CHECK_FALSE(generate_random(3, 5, 50, 7) == generate_random(3, 5, 50, 8));
  }
  SUBCASE("rejects theta >= omega") {
    CHECK_THROWS_AS(generate_random(5, 3, 50, 1), Error);
    CHECK_THROWS_AS(generate_random(3, 3, 50, 1), Error);
  }
}

TEST_CASE("generated schedule properties") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    double theta = 0.5 + 0.1 * static_cast<double>(seed % 7);
    double omega = theta + 0.05 + 0.3 * static_cast<double>(seed % 5);
    auto s = generate_random(theta, omega, 30, seed);
    auto to = theta_omega(s);
    CHECK(to.theta >= theta);
    CHECK(to.omega <= omega);
    double rho = rho_star(s);
    CHECK(rho >= 0.0);
    CHECK(rho < 1.0);

    // Measure of the control set by fine sampling vs summed span widths.
    double width = 0.0;
    for (const auto& span : s.spans()) width += span.stop - span.start;
    const long samples = 2'000'000;
    const double h = s.horizon() / static_cast<double>(samples);
    long on = 0;
    for (long k = 0; k < samples; ++k)
      on += s.in_control((static_cast<double>(k) + 0.5) * h) ? 1 : 0;
    CHECK(static_cast<double>(on) * h == doctest::Approx(width).epsilon(1e-4));
    if (seed > 3) break;  // the sampling check is slow; a few seeds suffice
  }
}

TEST_CASE("rho_star only sees theta and omega") {
  IntermittentSchedule no_rest({{0, 2}, {2, 4}, {4, 6}}, 6);
  CHECK(rho_star(no_rest) == 0.0);
  // No rest anywhere, but uneven spans still give a positive bound.
  IntermittentSchedule uneven({{0, 2}, {2, 5}, {5, 6}}, 6);
  CHECK(rho_star(uneven) == doctest::Approx(2.0 / 3.0));
  IntermittentSchedule with_rest({{0, 2}, {2.5, 4.5}}, 5);
  CHECK(rho_star(with_rest) == doctest::Approx(0.2));
}

TEST_CASE("construction invariants") {
  CHECK_THROWS_AS(IntermittentSchedule({{1, 2}}, 3), Error);
  CHECK_THROWS_AS(IntermittentSchedule({{0, 2}, {1.5, 3}}, 4), Error);
  CHECK_THROWS_AS(IntermittentSchedule({{0, 0}}, 1), Error);
  CHECK_THROWS_AS(IntermittentSchedule({{0, 2}}, 1), Error);
}

TEST_CASE("schedule text format") {
  auto s = generate_random(2, 2.5, 20, 11);
  std::istringstream in(format_schedule(s));
  CHECK(parse_schedule(in) == s);

  std::istringstream no_end("# spans\n0 1\n1.5 3\n");
  auto parsed = parse_schedule(no_end);
  CHECK(parsed.horizon() == 3);
  CHECK(parsed.spans().size() == 2);

  std::istringstream bad("0 1 2\n");
  CHECK_THROWS_AS(parse_schedule(bad), Error);
  std::istringstream junk("0 x\n");
  CHECK_THROWS_AS(parse_schedule(junk), Error);
}
