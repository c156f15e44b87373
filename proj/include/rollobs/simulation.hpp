#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "rollobs/config.hpp"
#include "rollobs/identifier.hpp"
#include "rollobs/observer.hpp"

namespace rollobs {

inline constexpr std::array<std::string_view, 16> kTimeseriesColumns = {
    "t",           "vy",          "r",          "vy_hat",      "r_hat",         "theta1_true",
    "theta2_true", "theta1_hat",  "theta2_hat", "Z1",          "Z1_bar",        "err_norm_X",
    "err_norm_Y",  "state_norm_X", "est_norm_X", "pe_min_eig"};

inline constexpr std::array<std::string_view, 6> kSnapshotColumns = {"t", "xi", "z1", "z2", "z1_hat", "z2_hat"};

struct TimeseriesRow {
  double t = 0.0;
  double vy = 0.0, r = 0.0;
  double vy_hat = 0.0, r_hat = 0.0;
  double theta1_true = 0.0, theta2_true = 0.0;
  double theta1_hat = 0.0, theta2_hat = 0.0;
  double Z1 = 0.0, Z1_bar = 0.0;
  double err_norm_X = 0.0, err_norm_Y = 0.0;
  double state_norm_X = 0.0, est_norm_X = 0.0;
  std::optional<double> pe_min_eig;  // empty until the PE window is filled
};

struct Snapshot {
  double t = 0.0;
  Field z;
  Field z_hat;
};

/// Plant, identifier and observer advanced in lockstep on one clock. Within a
/// step the boundary measurements are taken from the pre-step plant state and
/// every subsystem is advanced from pre-step information.
class Simulation {
 public:
  explicit Simulation(const ScenarioConfig& cfg);

  void step();

  long steps() const { return steps_; }
  double time() const { return plant_.t; }

  const ScenarioConfig& config() const { return cfg_; }
  const DiscreteModel& model() const { return model_; }
  const PlantState& plant() const { return plant_; }
  const ObserverState& observer() const { return observer_; }
  const FilterState& filters() const { return filters_; }
  const IdentifierState& identifier() const { return identifier_; }
  const ObserverGains& gains() const { return gains_; }
  const InputSignal& input() const { return input_; }

  /// Boundary measurements of the current plant state.
  MeasurementFrame measure() const;

  std::optional<double> pe_min_eig() const { return pe_.min_eigenvalue(); }

  TimeseriesRow sample() const;

 private:
  Vec y1_rate_now(const Vec& Y1) const;

  ScenarioConfig cfg_;
  DiscreteModel model_;
  StepperConfig stepper_;
  InputSignal input_;
  ObserverGains gains_;
  IdentifierGains id_gains_;
  ObserverOptions obs_options_;

  PlantState plant_;
  ObserverState observer_;
  FilterState filters_;
  IdentifierState identifier_;
  PeMonitor pe_;
  long steps_ = 0;
  std::optional<Vec> previous_Y1_;
};

struct RunRecord {
  std::vector<TimeseriesRow> rows;
  std::vector<Snapshot> snapshots;
};

/// Runs the scenario to t_end without touching the filesystem.
RunRecord simulate(const ScenarioConfig& cfg);

struct PhaseSummary {
  double start = 0.0;
  double end = 0.0;
  Vec theta;
  std::optional<double> theta_reached_at;  // first time after which the error stays within tolerance
  double err_norm_X_min = 0.0;
  double err_norm_X_max = 0.0;
};

struct PeSummary {
  double window = 0.0;
  double threshold = 0.0;
  std::optional<double> first_ready_t;
  std::optional<double> min_eig;
  std::optional<double> max_eig;
  double fraction_above_threshold = 0.0;
};

struct RunSummary {
  Vec final_theta_hat;
  double theta_tolerance = 0.0;
  std::vector<PhaseSummary> phases;
  PeSummary pe;
  double wall_clock_seconds = 0.0;
};

/// Everything except the wall-clock time is computed from the recorded rows,
/// so a summary can be rebuilt from timeseries.csv alone.
RunSummary summarize(const ScenarioConfig& cfg, const std::vector<TimeseriesRow>& rows);

/// Runs the scenario and writes timeseries.csv, snapshots.csv and
/// summary.json to cfg.output_dir.
RunSummary run_experiment(const ScenarioConfig& cfg);

}  // namespace rollobs
