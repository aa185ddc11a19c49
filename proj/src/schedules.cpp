#include "fsp/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fsp/oracle.hpp"

namespace fsp {

namespace {
constexpr double kE = 2.718281828459045;
}

double radius_deterministic(double y_norm, double c_P, double lambda_X) {
  return (y_norm / c_P) * kE + std::sqrt(kE * kE * kE * lambda_X / c_P) + lambda_X;
}

double radius_stochastic(double G, double H) { return (H / G) * kE + std::sqrt(kE * kE * kE / G) + 1.0; }

double beta_structural(double C_P, double C_TV) {
  return 1.0 / (2.0 * C_P * (C_P + 3.0 * C_TV) * std::exp(0.2));
}

Calibration calibrate(const AssumptionBounds& bounds, double nu0_tv, double kappa, double lambda_X,
                      double y_norm, bool stochastic) {
  if (!(bounds.c_P_est > 0.0))
    throw CalibrationUnavailable("calibration unavailable: kernel positivity (c_P > 0) fails; supply manual rates");
  if (stochastic && !(bounds.G > 0.0))
    throw CalibrationUnavailable("calibration unavailable: per-sample kernel positivity (G > 0) fails; supply manual rates");
  if (!(kappa > 0.0)) throw std::invalid_argument("calibrate: kappa must be positive");
  if (!(bounds.C_P_est > 0.0)) throw std::invalid_argument("calibrate: C_P must be positive");

  Calibration cal;
  cal.stochastic = stochastic;
  cal.kappa = kappa;
  cal.C_P = bounds.C_P_est;
  cal.R = stochastic ? radius_stochastic(bounds.G, bounds.H) : radius_deterministic(y_norm, bounds.c_P_est, lambda_X);
  cal.C_TV = std::max(nu0_tv, 2.0 * cal.R);
  cal.cap_radius = 1.0 / (1.0 + cal.R);
  cal.cap_structural = 1.0 / (10.0 * (1.0 + cal.C_TV + cal.C_P + kappa) * std::max(1.0, cal.C_TV));
  cal.hoeffding_cap = std::numeric_limits<double>::infinity();
  if (stochastic) {
    if (!(bounds.E_inf_est > 0.0)) throw std::invalid_argument("calibrate: E_inf must be positive");
    cal.hoeffding_cap = hoeffding_constant() / bounds.E_inf_est;
  }
  cal.alpha = cal.cap_radius;
  cal.binding_cap = "radius";
  if (cal.cap_structural < cal.alpha) {
    cal.alpha = cal.cap_structural;
    cal.binding_cap = "structural";
  }
  if (cal.hoeffding_cap < cal.alpha) {
    cal.alpha = cal.hoeffding_cap;
    cal.binding_cap = "hoeffding";
  }
  cal.beta_max_struct = beta_structural(cal.C_P, cal.C_TV);
  cal.chosen_beta = cal.beta_max_struct;
  return cal;
}

long min_horizon(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("min_horizon: alpha must be positive");
  return static_cast<long>(std::ceil(1.0 / (alpha * alpha) - 1e-9));
}

HorizonPlan horizon_plan(long K, double alpha, double beta_max_struct, int d) {
  const long k_min = min_horizon(alpha);
  if (K < std::max(1L, k_min))
    throw std::invalid_argument("horizon_plan: K = " + std::to_string(K) + " is below the minimum " +
                                std::to_string(std::max(1L, k_min)) + " = ceil(1/alpha^2)");
  HorizonPlan plan;
  plan.K = K;
  const double root = std::sqrt(static_cast<double>(K));
  plan.eps = 1.0 / root;
  plan.m = static_cast<std::size_t>(K);
  plan.beta = std::min(beta_max_struct, 1.0 / (std::pow(alpha, d / 4.0) * root));
  return plan;
}

HorizonPlan horizon_plan(long K, const Calibration& cal, int d) {
  return horizon_plan(K, cal.alpha, cal.chosen_beta, d);
}

ScheduleStep anytime_at(long k, double alpha) {
  if (k < 0) throw std::invalid_argument("anytime_at: k must be >= 0");
  const long kk = std::max(1L, k);
  const double kd = static_cast<double>(kk);
  return ScheduleStep{std::min(alpha, 1.0 / std::sqrt(kd)), static_cast<std::size_t>(kk), 1.0 / kd};
}

ScheduleStep anytime_at(long k, const Calibration& cal) { return anytime_at(k, cal.alpha); }

ScheduleStep schedule_at(const SchedulePlan& plan, long k) {
  if (const auto* h = std::get_if<HorizonPlan>(&plan)) return {h->eps, h->m, h->beta};
  if (const auto* a = std::get_if<AnytimePlan>(&plan)) {
    ScheduleStep s = anytime_at(k, a->alpha);
    s.beta = std::min(s.beta, a->beta_cap);
    return s;
  }
  const auto& c = std::get<ConstantPlan>(plan);
  return {c.eps, c.m, c.beta};
}

std::string plan_name(const SchedulePlan& plan) {
  if (std::holds_alternative<HorizonPlan>(plan)) return "horizon";
  if (std::holds_alternative<AnytimePlan>(plan)) return "anytime";
  return "constant";
}

}  // namespace fsp
