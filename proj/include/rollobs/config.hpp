#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "rollobs/pde_solver.hpp"
#include "rollobs/vehicle.hpp"

namespace rollobs {

enum class Y1RateMode { Analytic, BackwardDifference };

/// One experiment on the vehicle benchmark. Defaults reproduce the reference
/// scenario except for dt (1e-5 s instead of 1e-6 s).
struct ScenarioConfig {
  int grid_cells = 50;
  double dt = 1e-5;
  double t_end = 10.0;
  Scheme scheme = Scheme::ExplicitEuler;
  double cfl_limit = 1.0;

  double q = 50.0;
  double rho = 20.0;
  double psi = 50.0;
  double gamma = 5000.0;  // Gamma = gamma * I

  Vec X0 = Vec::Zero(2);
  Vec z0 = Vec::Zero(2);
  Vec X_hat0 = Vec::Zero(2);
  Vec z_hat0 = Vec::Zero(2);
  Vec theta_hat0 = Vec::Zero(2);
  bool freeze_theta_hat = false;

  vehicle::VehicleParams vehicle;  // owns the theta schedule and smoothing eps
  vehicle::SteeringSpec steering;
  double observer_lambda_factor = 1.0;
  Y1RateMode y1dot_mode = Y1RateMode::Analytic;

  std::filesystem::path output_dir = "out";
  double record_interval = 1e-3;
  bool raw_output = false;
  std::vector<double> snapshot_times;

  double pe_window = 3.14159265358979323846;
  double pe_threshold = 1e-6;
  double theta_tolerance = 0.05;

  Grid grid() const { return Grid{grid_cells}; }
  StepperConfig stepper() const { return {dt, scheme, cfl_limit}; }

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

ScenarioConfig default_config();

/// Parses a JSON scenario. Missing keys take their defaults; unknown keys are
/// rejected. `origin` is used in error messages.
ScenarioConfig parse_config(std::string_view text, std::string_view origin = "<config>");

ScenarioConfig load_config(const std::filesystem::path& path);

}  // namespace rollobs
