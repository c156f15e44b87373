#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "rollobs/core_model.hpp"

namespace rollobs::vehicle {

/// Friction step of the benchmark: [1.2, 0.8] until t = 5 s, then [0.6, 0.4].
ThetaSchedule benchmark_theta_schedule();

/// Single-track lateral model with distributed Dahl tire friction. States are
/// X = [v_y, r], distributed bristle deflections z = [z_1, z_2] and inputs
/// U = [delta_1, delta_2]. Units: m, s, kg, N.
struct VehicleParams {
  double v_x = 20.0;
  double m = 1300.0;
  double I_z = 2000.0;
  double l1 = 1.0;
  double l2 = 1.6;
  double L1_patch = 0.11;
  double L2_patch = 0.09;
  double sigma1 = 165.0;
  double sigma2 = 415.0;
  std::function<double(double)> mu1 = [](double) { return 1.0; };
  std::function<double(double)> mu2 = [](double) { return 1.0; };
  double p01 = 3.75e4;
  double p02 = 2.86e4;
  double a1 = 0.1;
  double a2 = 0.1;
  ThetaSchedule theta_schedule = benchmark_theta_schedule();
  double smoothing_eps = 0.0;

  void validate() const;
};

struct SineTerm {
  double amplitude = 0.0;
  double frequency = 0.0;  // rad/s
};

struct SteeringSpec {
  std::vector<SineTerm> delta1;
  std::vector<SineTerm> delta2;

  /// delta_1 = 0.05 sin(2t) + 0.01 sin(4t), delta_2 = 0.
  static SteeringSpec benchmark();
};

struct SteeringSample {
  Vec value;
  Vec derivative;
};

SystemDefinition build_vehicle_system(const VehicleParams& p);

double pressure_profile(double xi, double p0, double a);

/// Smoothed absolute value: |x| when eps == 0, sqrt(x^2 + eps^2) - eps otherwise.
double smooth_abs(double x, double eps);

Mat sigma_matrix(const Vec& v, const VehicleParams& p);

SteeringSample steering_input(double t, const SteeringSpec& spec);
InputSignal steering_signal(const SteeringSpec& spec);

/// Lateral tire forces (F_y1, F_y2) in N.
std::pair<double, double> tire_forces(const Field& z, const VehicleParams& p);

}  // namespace rollobs::vehicle
