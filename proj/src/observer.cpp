#include "rollobs/observer.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rollobs {

double spectral_abscissa(const Mat& m) {
  Eigen::EigenSolver<Mat> eig(m, false);
  return eig.eigenvalues().real().maxCoeff();
}

ObserverGains::ObserverGains(Mat L1, const SystemDefinition& sys, double q) : L1_(std::move(L1)), q_(q) {
  if (L1_.rows() != sys.n_x() || L1_.cols() != sys.n_z())
    throw ConfigError("L1 must be n_x x n_z");
  A1_bar_ = sys.A1 + L1_ * sys.A2;
  const double abscissa = spectral_abscissa(A1_bar_);
  if (!(abscissa < 0.0)) {
    std::ostringstream os;
    os << "A1 + L1 A2 is not Hurwitz (largest eigenvalue real part " << abscissa << ")";
    throw DesignError(os.str());
  }
}

Mat design_gain_L1(const Mat& A1, const Mat& A2, double q) {
  if (A2.rows() != A2.cols() || A2.rows() != A1.rows())
    throw DesignError("A2 is not square; supply L1 directly (requires (A1, A2) detectable)");
  Eigen::FullPivLU<Mat> lu(A2);
  if (!lu.isInvertible()) throw DesignError("A2 is singular; supply L1 directly (requires (A1, A2) detectable)");
  const Mat shifted = A1 + q * Mat::Identity(A1.rows(), A1.cols());
  return -shifted * lu.inverse();
}

Vec estimated_output(const Vec& X_hat, const Vec& U, const SystemDefinition& sys) {
  return sys.h2(relative_velocity(X_hat, U, sys));
}

namespace {

struct ObserverRates {
  Vec dX;
  Field dz;
};

struct HeldSignals {
  const Vec& Y1;
  Vec v_meas;
  Vec theta_hat;
  const Vec& U;
  Mat source;       // diag(theta_hat) Sigma(h2_inv(Y1))
  Vec lambda;       // transport velocities used by the observer
};

ObserverRates observer_rates(const DiscreteModel& model, const ObserverGains& gains, const HeldSignals& s,
                             const Vec& X_hat, const Field& z_hat) {
  const auto& sys = model.system();
  const Vec y1_hat = estimated_output(X_hat, s.U, sys);
  const Vec innovation = s.v_meas - sys.h2_inv(y1_hat);
  ObserverRates r;
  r.dX = lumped_rhs(sys, X_hat, model.K1(z_hat), model.K2(z_hat), s.theta_hat, s.v_meas) - gains.L1() * innovation;
  r.dz = s.source * z_hat - upwind_transport(z_hat, s.lambda, model.grid().dxi());
  r.dz.colwise() += s.Y1;
  r.dz.col(0).setZero();
  return r;
}

}  // namespace

void advance_observer(ObserverState& obs, const Vec& Y1, const Vec& theta_hat, const Vec& U,
                      const DiscreteModel& model, const ObserverGains& gains, const StepperConfig& cfg,
                      const ObserverOptions& options) {
  const auto& sys = model.system();
  if (!(options.lambda_factor > 0.0)) throw ConfigError("observer lambda factor must be positive");
  if (obs.z_hat.cols() != model.grid().nodes() || obs.z_hat.rows() != sys.n_z())
    throw ConfigError("observer field does not match the model grid");

  HeldSignals held{Y1, sys.h2_inv(Y1), theta_hat, U, Mat(), options.lambda_factor * sys.lambda};
  held.source = theta_hat.asDiagonal() * sys.sigma(held.v_meas);
  require_cfl(held.lambda, cfg, model.grid().dxi());

  const double dt = cfg.dt;
  if (cfg.scheme == Scheme::ExplicitEuler) {
    const ObserverRates k = observer_rates(model, gains, held, obs.X_hat, obs.z_hat);
    obs.X_hat += dt * k.dX;
    obs.z_hat += dt * k.dz;
  } else {
    const ObserverRates k1 = observer_rates(model, gains, held, obs.X_hat, obs.z_hat);
    const ObserverRates k2 =
        observer_rates(model, gains, held, obs.X_hat + 0.5 * dt * k1.dX, obs.z_hat + 0.5 * dt * k1.dz);
    const ObserverRates k3 =
        observer_rates(model, gains, held, obs.X_hat + 0.5 * dt * k2.dX, obs.z_hat + 0.5 * dt * k2.dz);
    const ObserverRates k4 = observer_rates(model, gains, held, obs.X_hat + dt * k3.dX, obs.z_hat + dt * k3.dz);
    obs.X_hat += (dt / 6.0) * (k1.dX + 2.0 * k2.dX + 2.0 * k3.dX + k4.dX);
    obs.z_hat += (dt / 6.0) * (k1.dz + 2.0 * k2.dz + 2.0 * k3.dz + k4.dz);
  }
  obs.z_hat.col(0).setZero();
  obs.t += dt;
  if (!obs.X_hat.allFinite()) throw BlowUpError("observer lumped state X_hat", obs.t);
  if (!obs.z_hat.allFinite()) throw BlowUpError("observer distributed state z_hat", obs.t);
}

ObserverState step_observer(const ObserverState& obs, const Vec& Y1, const Vec& theta_hat, const Vec& U,
                            const DiscreteModel& model, const ObserverGains& gains, const StepperConfig& cfg,
                            const ObserverOptions& options) {
  ObserverState next = obs;
  advance_observer(next, Y1, theta_hat, U, model, gains, cfg, options);
  return next;
}

ErrorMetrics error_metrics(const PlantState& plant, const ObserverState& obs, const Vec& theta_hat, double dxi) {
  if (plant.z.rows() != obs.z_hat.rows() || plant.z.cols() != obs.z_hat.cols())
    throw ConfigError("plant and observer fields live on different grids");
  if (plant.X.size() != obs.X_hat.size()) throw ConfigError("plant and observer lumped states differ in size");
  ErrorMetrics m;
  m.X_tilde = plant.X - obs.X_hat;
  const Field z_tilde = plant.z - obs.z_hat;
  m.err_norm_X = norm_X(m.X_tilde, z_tilde, dxi);
  m.err_norm_Y = norm_Y(m.X_tilde, z_tilde, dxi);
  m.theta_tilde_norm = (plant.theta_now() - theta_hat).norm();
  return m;
}

}  // namespace rollobs
