#include <doctest.h>

#include <cmath>
#include <limits>

#include "fsp/oracle.hpp"
#include "fsp/schedules.hpp"

using namespace fsp;

namespace {

AssumptionBounds bounds(double c_P, double C_P, double E, double G = 1.0, double H = 1.0) {
  AssumptionBounds b;
  b.c_P_est = c_P;
  b.C_P_est = C_P;
  b.E_inf_est = E;
  b.G = G;
  b.H = H;
  b.positivity_ok = c_P > 0.0;
  return b;
}

}  // namespace

TEST_CASE("radius closed forms") {
  const double e = std::exp(1.0);
  CHECK(radius_deterministic(0.0, 1.0, 1.0) == doctest::Approx(std::pow(e, 1.5) + 1.0));
  CHECK(radius_deterministic(2.0, 0.5, 1.0) == doctest::Approx(4.0 * e + std::sqrt(2.0 * e * e * e) + 1.0));
  CHECK(radius_stochastic(1.0, 1.0) == doctest::Approx(e + std::pow(e, 1.5) + 1.0));
  CHECK(beta_structural(1.0, 1.0) == doctest::Approx(1.0 / (8.0 * std::exp(0.2))));
}

TEST_CASE("calibration: C_TV and the binding cap") {
  const double R = radius_deterministic(0.0, 1.0, 1.0);
  const Calibration a = calibrate(bounds(1.0, 2.0, 1.0), 1.0, 0.1, 1.0, 0.0, false);
  CHECK(a.R == doctest::Approx(R));
  CHECK(a.C_TV == doctest::Approx(2.0 * R));
  CHECK(a.binding_cap == "structural");
  CHECK(a.alpha == doctest::Approx(1.0 / (10.0 * (1.0 + 2 * R + 2.0 + 0.1) * 2 * R)));
  CHECK(a.alpha <= a.cap_radius);
  CHECK(std::isinf(a.hoeffding_cap));
  CHECK(a.chosen_beta == doctest::Approx(beta_structural(2.0, 2 * R)));

  const Calibration big = calibrate(bounds(1.0, 2.0, 1.0), 3.0 * R, 0.1, 1.0, 0.0, false);
  CHECK(big.C_TV == doctest::Approx(3.0 * R));

  const Calibration h = calibrate(bounds(1.0, 2.0, 1e9), 1.0, 0.1, 1.0, 0.0, true);
  CHECK(h.binding_cap == "hoeffding");
  CHECK(h.alpha == doctest::Approx(hoeffding_constant() / 1e9));
  CHECK(check_hoeffding_cap(h.alpha, 1e9));
}

TEST_CASE("calibration is unavailable without positivity") {
  CHECK_THROWS_AS(calibrate(bounds(0.0, 1.0, 1.0), 1.0, 0.1, 1.0, 0.0, false), CalibrationUnavailable);
  CHECK_THROWS_AS(calibrate(bounds(1.0, 1.0, 1.0, 0.0), 1.0, 0.1, 1.0, 0.0, true), CalibrationUnavailable);
  CHECK_NOTHROW(calibrate(bounds(1.0, 1.0, 1.0, 0.0), 1.0, 0.1, 1.0, 0.0, false));
}

TEST_CASE("horizon plan") {
  CHECK(min_horizon(0.1) == 100);
  CHECK(min_horizon(0.3) == 12);
  const HorizonPlan p = horizon_plan(100, 0.1, std::numeric_limits<double>::infinity(), 2);
  CHECK(p.eps == doctest::Approx(0.1));
  CHECK(p.m == 100);
  CHECK(p.beta == doctest::Approx(1.0 / (std::sqrt(0.1) * 10.0)));
  CHECK(horizon_plan(100, 0.1, 0.05, 2).beta == 0.05);
  CHECK_THROWS_AS(horizon_plan(99, 0.1, 1.0, 2), std::invalid_argument);
  const SchedulePlan sp = p;
  CHECK(schedule_at(sp, 1).eps == schedule_at(sp, 100).eps);
}

TEST_CASE("anytime schedule") {
  const ScheduleStep s = anytime_at(4, 1.0);
  CHECK(s.eps == doctest::Approx(0.5));
  CHECK(s.m == 4);
  CHECK(s.beta == doctest::Approx(0.25));
  const ScheduleStep z = anytime_at(0, 0.3);
  CHECK(z.eps == doctest::Approx(0.3));
  CHECK(z.m == 1);
  CHECK(z.beta == 1.0);
  CHECK(anytime_at(100, 0.01).eps == 0.01);
  CHECK_THROWS_AS(anytime_at(-1, 0.1), std::invalid_argument);
  ScheduleStep prev = anytime_at(1, 0.5);
  for (long k = 2; k < 500; ++k) {
    const ScheduleStep cur = anytime_at(k, 0.5);
    CHECK(cur.eps <= prev.eps);
    CHECK(cur.m >= prev.m);
    CHECK(cur.beta <= prev.beta);
    prev = cur;
  }
  const SchedulePlan capped = AnytimePlan{0.5, 0.1};
  CHECK(schedule_at(capped, 2).beta == 0.1);
  CHECK(schedule_at(capped, 20).beta == doctest::Approx(0.05));
}

TEST_CASE("schedule evaluation is pure") {
  const SchedulePlan plan = AnytimePlan{0.37, 0.02};
  for (long k : {0L, 1L, 7L, 1000L}) {
    const ScheduleStep a = schedule_at(plan, k), b = schedule_at(plan, k);
    CHECK(a.eps == b.eps);
    CHECK(a.m == b.m);
    CHECK(a.beta == b.beta);
  }
  const SchedulePlan c = ConstantPlan{0.2, 32, 0.5};
  CHECK(schedule_at(c, 9).m == 32);
  CHECK(plan_name(c) == "constant");
  CHECK(plan_name(plan) == "anytime");
}
