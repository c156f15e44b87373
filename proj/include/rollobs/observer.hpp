#pragma once

#include "rollobs/pde_solver.hpp"

namespace rollobs {

struct ObserverState {
  double t = 0.0;
  Vec X_hat;
  Field z_hat;
};

/// Output-injection gain L1 and the resulting closed-loop matrix
/// A1 + L1 A2, which must be Hurwitz.
class ObserverGains {
 public:
  /// Throws DesignError if A1 + L1 A2 is not Hurwitz.
  ObserverGains(Mat L1, const SystemDefinition& sys, double q = 0.0);

  const Mat& L1() const { return L1_; }
  const Mat& A1_bar() const { return A1_bar_; }
  double q() const { return q_; }

 private:
  Mat L1_;
  Mat A1_bar_;
  double q_;
};

/// L1 = -(A1 + q I) A2^{-1}, which places A1 + L1 A2 at -q I. Requires a
/// square, invertible A2; otherwise the caller must supply L1 directly.
Mat design_gain_L1(const Mat& A1, const Mat& A2, double q);

/// Largest real part among the eigenvalues of m.
double spectral_abscissa(const Mat& m);

Vec estimated_output(const Vec& X_hat, const Vec& U, const SystemDefinition& sys);

struct ObserverOptions {
  // Scales the transport velocities used by the observer PDE (1 = exact).
  double lambda_factor = 1.0;
};

/// Advances the adaptive observer one step. The only plant information used is
/// the measurement Y1 and the input U; Y1, theta_hat and U are held across
/// stages when the scheme is multi-stage.
void advance_observer(ObserverState& obs, const Vec& Y1, const Vec& theta_hat, const Vec& U,
                      const DiscreteModel& model, const ObserverGains& gains, const StepperConfig& cfg,
                      const ObserverOptions& options = {});

ObserverState step_observer(const ObserverState& obs, const Vec& Y1, const Vec& theta_hat, const Vec& U,
                            const DiscreteModel& model, const ObserverGains& gains, const StepperConfig& cfg,
                            const ObserverOptions& options = {});

struct ErrorMetrics {
  double err_norm_X = 0.0;
  double err_norm_Y = 0.0;
  Vec X_tilde;
  double theta_tilde_norm = 0.0;
};

ErrorMetrics error_metrics(const PlantState& plant, const ObserverState& obs, const Vec& theta_hat, double dxi);

}  // namespace rollobs
