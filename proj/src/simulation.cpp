#include "rollobs/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <set>

#include "rollobs/io.hpp"

namespace rollobs {

namespace {

Field constant_field(const Vec& value, const Grid& grid) {
  return value.replicate(1, grid.nodes());
}

ScenarioConfig validated(const ScenarioConfig& cfg) {
  cfg.validate();
  return cfg;
}

}  // namespace

Simulation::Simulation(const ScenarioConfig& cfg)
    : cfg_(validated(cfg)),
      model_(vehicle::build_vehicle_system(cfg_.vehicle), cfg_.grid()),
      stepper_(cfg_.stepper()),
      input_(vehicle::steering_signal(cfg_.steering)),
      gains_(design_gain_L1(model_.system().A1, model_.system().A2, cfg_.q), model_.system(), cfg_.q),
      id_gains_(IdentifierGains::with_scalar_gamma(model_.system().n_z(), cfg_.rho, cfg_.psi, cfg_.gamma)),
      obs_options_{cfg_.observer_lambda_factor},
      plant_{0.0, cfg_.X0, constant_field(cfg_.z0, cfg_.grid()), cfg_.vehicle.theta_schedule},
      observer_{0.0, cfg_.X_hat0, constant_field(cfg_.z_hat0, cfg_.grid())},
      filters_(FilterState::zero(model_.system().n_z())),
      identifier_(IdentifierState::initial(cfg_.theta_hat0)),
      pe_(model_.system().n_z(), cfg_.pe_window, cfg_.dt) {
  id_gains_.validate();
  require_cfl(model_.system().lambda, stepper_, model_.grid().dxi());
  require_cfl(obs_options_.lambda_factor * model_.system().lambda, stepper_, model_.grid().dxi());
  pe_.push(filters_.varphi);
}

Vec Simulation::y1_rate_now(const Vec& Y1) const {
  const auto& sys = model_.system();
  if (cfg_.y1dot_mode == Y1RateMode::BackwardDifference && previous_Y1_) return (Y1 - *previous_Y1_) / cfg_.dt;
  const Vec U = input_.value(plant_.t);
  const Vec v = sys.A2 * plant_.X + sys.G2 * U;
  const Vec Xdot = lumped_rhs(sys, plant_.X, model_.K1(plant_.z), model_.K2(plant_.z), plant_.theta_now(), v);
  return y1_rate(v, Xdot, input_.derivative(plant_.t), sys);
}

MeasurementFrame Simulation::measure() const {
  const auto& sys = model_.system();
  MeasurementFrame m;
  m.t = plant_.t;
  m.Y1 = synthesize_Y1(plant_, input_.value(plant_.t), sys);
  m.Y2 = synthesize_Y2(m.Y1, y1_rate_now(m.Y1), plant_.theta_now(), sys);
  return m;
}

void Simulation::step() {
  const double t = plant_.t;
  const Vec U = input_.value(t);
  const MeasurementFrame frame = measure();
  const RegressionFrame regression = regression_frame(frame, model_.system());
  const Vec theta_hat = identifier_.theta_hat;  // held over the step for the observer

  if (!cfg_.freeze_theta_hat) identifier_ = step_adaptive_law(identifier_, filters_, regression.Z1, id_gains_, cfg_.dt);
  filters_ = step_filters(filters_, regression, id_gains_, cfg_.dt);
  if (!identifier_.theta_hat.allFinite()) throw BlowUpError("parameter estimate theta_hat", t + cfg_.dt);

  advance_observer(observer_, frame.Y1, theta_hat, U, model_, gains_, stepper_, obs_options_);
  advance_plant(plant_, input_, model_, stepper_);

  ++steps_;
  // Time comes from the step count rather than a running sum.
  plant_.t = static_cast<double>(steps_) * cfg_.dt;
  observer_.t = plant_.t;
  pe_.push(filters_.varphi);
  previous_Y1_ = frame.Y1;
}

TimeseriesRow Simulation::sample() const {
  const auto& sys = model_.system();
  const double dxi = model_.grid().dxi();
  const Vec& theta = plant_.theta_now();
  const Vec& theta_hat = identifier_.theta_hat;
  const ErrorMetrics err = error_metrics(plant_, observer_, theta_hat, dxi);
  const Vec Y1 = synthesize_Y1(plant_, input_.value(plant_.t), sys);

  TimeseriesRow row;
  row.t = plant_.t;
  row.vy = plant_.X[0];
  row.r = plant_.X[1];
  row.vy_hat = observer_.X_hat[0];
  row.r_hat = observer_.X_hat[1];
  row.theta1_true = theta[0];
  row.theta2_true = theta[1];
  row.theta1_hat = theta_hat[0];
  row.theta2_hat = theta_hat[1];
  row.Z1 = Y1.sum();
  row.Z1_bar = nonadaptive_estimate(theta, filters_);
  row.err_norm_X = err.err_norm_X;
  row.err_norm_Y = err.err_norm_Y;
  row.state_norm_X = norm_X(plant_.X, plant_.z, dxi);
  row.est_norm_X = norm_X(observer_.X_hat, observer_.z_hat, dxi);
  row.pe_min_eig = pe_.min_eigenvalue();
  return row;
}

namespace {

// First step index whose time k * dt reaches t.
long first_step_at_or_after(double t, double dt) {
  long k = static_cast<long>(std::ceil(t / dt));
  while (k > 0 && static_cast<double>(k - 1) * dt >= t) --k;
  while (static_cast<double>(k) * dt < t) ++k;
  return k;
}

}  // namespace

RunRecord simulate(const ScenarioConfig& cfg) {
  Simulation sim(cfg);
  const long total = std::lround(cfg.t_end / cfg.dt);
  const long decimation = cfg.raw_output ? 1 : std::max(1L, std::lround(cfg.record_interval / cfg.dt));

  std::set<long> forced;
  for (const auto& phase : cfg.vehicle.theta_schedule.phases()) {
    const long k = first_step_at_or_after(phase.start, cfg.dt);
    if (k <= total) forced.insert(k);
  }
  std::set<long> snapshot_steps;
  for (double s : cfg.snapshot_times) {
    const long k = first_step_at_or_after(s, cfg.dt);
    if (k <= total) snapshot_steps.insert(k);
  }

  RunRecord record;
  record.rows.reserve(static_cast<std::size_t>(total / decimation + forced.size() + 2));
  for (long k = 0;; ++k) {
    if (k % decimation == 0 || k == total || forced.count(k)) record.rows.push_back(sim.sample());
    if (snapshot_steps.count(k)) record.snapshots.push_back({sim.time(), sim.plant().z, sim.observer().z_hat});
    if (k == total) break;
    sim.step();
  }
  return record;
}

RunSummary summarize(const ScenarioConfig& cfg, const std::vector<TimeseriesRow>& rows) {
  RunSummary summary;
  summary.theta_tolerance = cfg.theta_tolerance;
  if (rows.empty()) return summary;
  summary.final_theta_hat = Eigen::Vector2d(rows.back().theta1_hat, rows.back().theta2_hat);

  const auto& phases = cfg.vehicle.theta_schedule.phases();
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const double start = phases[i].start;
    const double end = i + 1 < phases.size() ? phases[i + 1].start : std::numeric_limits<double>::infinity();
    PhaseSummary ps;
    ps.start = start;
    ps.end = std::min(end, rows.back().t);
    ps.theta = phases[i].theta;
    ps.err_norm_X_min = std::numeric_limits<double>::infinity();
    ps.err_norm_X_max = -std::numeric_limits<double>::infinity();
    const double bound = cfg.theta_tolerance * ps.theta.norm();
    std::optional<double> candidate;
    bool any = false;
    for (const auto& row : rows) {
      if (row.t < start || row.t >= end) continue;
      any = true;
      ps.err_norm_X_min = std::min(ps.err_norm_X_min, row.err_norm_X);
      ps.err_norm_X_max = std::max(ps.err_norm_X_max, row.err_norm_X);
      const double err = (Eigen::Vector2d(row.theta1_hat, row.theta2_hat) - ps.theta).norm();
      if (err <= bound) {
        if (!candidate) candidate = row.t;
      } else {
        candidate.reset();
      }
    }
    if (!any) continue;
    ps.theta_reached_at = candidate;
    summary.phases.push_back(ps);
  }

  PeSummary& pe = summary.pe;
  pe.window = cfg.pe_window;
  pe.threshold = cfg.pe_threshold;
  std::size_t ready = 0;
  std::size_t above = 0;
  for (const auto& row : rows) {
    if (!row.pe_min_eig) continue;
    const double v = *row.pe_min_eig;
    if (!pe.first_ready_t) pe.first_ready_t = row.t;
    pe.min_eig = pe.min_eig ? std::min(*pe.min_eig, v) : v;
    pe.max_eig = pe.max_eig ? std::max(*pe.max_eig, v) : v;
    ++ready;
    if (v > cfg.pe_threshold) ++above;
  }
  pe.fraction_above_threshold = ready ? static_cast<double>(above) / static_cast<double>(ready) : 0.0;
  return summary;
}

RunSummary run_experiment(const ScenarioConfig& cfg) {
  const auto started = std::chrono::steady_clock::now();
  const RunRecord record = simulate(cfg);
  RunSummary summary = summarize(cfg, record.rows);
  summary.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.output_dir.string() + ": " + ec.message());
  write_timeseries(record.rows, cfg.output_dir);
  write_snapshots(record.snapshots, cfg.grid(), cfg.output_dir);
  write_summary(summary, cfg.output_dir);
  return summary;
}

}  // namespace rollobs
