#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>

#include "fsp/kernel_model.hpp"

namespace fsp {

/// Step sizes derived from the audited kernel constants.
struct Calibration {
  bool stochastic = false;
  double R = 0.0;  // R-hat in the stochastic case
  double C_TV = 0.0;
  double C_P = 0.0;
  double kappa = 0.0;
  double cap_radius = 0.0;      // 1 / (1 + R)
  double cap_structural = 0.0;  // 1 / (10 (1 + C_TV + C_P + kappa) (1 v C_TV))
  double hoeffding_cap = 0.0;   // sqrt(8 log 8) / E_inf, +inf when deterministic
  double alpha = 0.0;
  std::string binding_cap;      // "radius", "structural" or "hoeffding"
  double beta_max_struct = 0.0;
  double chosen_beta = 0.0;
};


/// Throws CalibrationUnavailable when the kernel positivity constant is zero.
Calibration calibrate(const AssumptionBounds& bounds, double nu0_tv, double kappa, double lambda_X,
                      double y_norm, bool stochastic);

class CalibrationUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic radius R = (|y| / c_P) e + sqrt(e^3 vol / c_P) + vol.
double radius_deterministic(double y_norm, double c_P, double lambda_X);
/// Stochastic radius (H / G) e + sqrt(e^3 / G) + 1.
double radius_stochastic(double G, double H);
/// 1 / (2 C_P (C_P + 3 C_TV) e^{1/5})
double beta_structural(double C_P, double C_TV);

struct ScheduleStep {
  double eps = 0.0;
  std::size_t m = 1;
  double beta = 0.0;
};

struct HorizonPlan {
  long K = 0;
  double eps = 0.0;
  std::size_t m = 1;
  double beta = 0.0;
};
struct AnytimePlan {
  double alpha = 0.0;
  double beta_cap = 0.0;  // +inf means uncapped
};
struct ConstantPlan {
  double eps = 0.0;
  std::size_t m = 1;
  double beta = 0.0;
};
using SchedulePlan = std::variant<HorizonPlan, AnytimePlan, ConstantPlan>;

/// Smallest horizon for which 1/sqrt(K) <= alpha.
long min_horizon(double alpha);
/// Requires K >= ceil(1 / alpha^2).
HorizonPlan horizon_plan(long K, const Calibration& cal, int d);
HorizonPlan horizon_plan(long K, double alpha, double beta_max_struct, int d);

/// (min(alpha, 1/sqrt(k v 1)), k v 1, 1/(k v 1))
ScheduleStep anytime_at(long k, double alpha);
ScheduleStep anytime_at(long k, const Calibration& cal);

ScheduleStep schedule_at(const SchedulePlan& plan, long k);
std::string plan_name(const SchedulePlan& plan);

}  // namespace fsp
