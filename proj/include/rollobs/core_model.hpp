#pragma once

#include <functional>
#include <vector>

#include "rollobs/types.hpp"

namespace rollobs {

/// Semilinear homodirectional ODE-PDE plant
///
///   X'      = A1 X + G1 (K1 z) + G1 Theta Sigma(v) (K2 z) + G1 h1(v)
///   z_t + Lambda z_xi = Theta Sigma(v) z + h2(v),   z(0, t) = 0
///   v       = A2 X + G2 U
///
/// with coupling functionals (K1 z) = int K1(xi) z dxi + K2 z(1) and
/// (K2 z) = int K3(xi) z dxi. Theta is not part of the definition; it is the
/// unknown parameter carried by the plant state.
struct SystemDefinition {
  Mat A1;      // n_x x n_x
  Mat A2;      // n_z x n_x
  Mat G1;      // n_x x n_z
  Mat G2;      // n_z x n_u
  Vec lambda;  // diagonal of Lambda, strictly positive

  std::function<Mat(const Vec&)> sigma;
  std::function<Vec(const Vec&)> h1;
  std::function<Vec(const Vec&)> h2;
  std::function<Vec(const Vec&)> h2_inv;
  std::function<Mat(const Vec&)> dh2;  // optional Jacobian of h2

  std::function<Mat(double)> K1;
  Mat K2;
  std::function<Mat(double)> K3;

  Eigen::Index n_x() const { return A1.rows(); }
  Eigen::Index n_z() const { return lambda.size(); }
  Eigen::Index n_u() const { return G2.cols(); }

  /// Throws ConfigError on inconsistent dimensions, non-positive Lambda,
  /// missing functions or a failed h2_inv(h2(v)) round trip.
  void validate() const;
};

struct ThetaPhase {
  double start = 0.0;
  Vec theta;
};

/// Piecewise-constant true parameter. The value at t is the one of the last
/// phase whose start is <= t, so a switch at t_s is seen by the first step
/// whose pre-step time reaches t_s.
class ThetaSchedule {
 public:
  ThetaSchedule() = default;
  explicit ThetaSchedule(Vec constant);
  explicit ThetaSchedule(std::vector<ThetaPhase> phases);

  const Vec& at(double t) const;
  const std::vector<ThetaPhase>& phases() const { return phases_; }
  Eigen::Index size() const { return phases_.empty() ? 0 : phases_.front().theta.size(); }

 private:
  std::vector<ThetaPhase> phases_;
};

struct PlantState {
  double t = 0.0;
  Vec X;
  Field z;
  ThetaSchedule theta;

  const Vec& theta_now() const { return theta.at(t); }
};

struct InputSignal {
  std::function<Vec(double)> value;
  std::function<Vec(double)> derivative;
};

struct MeasurementFrame {
  double t = 0.0;
  Vec Y1;
  Vec Y2;
};

Vec relative_velocity(const Vec& X, const Vec& U, const SystemDefinition& sys);

/// Trapezoid weights for a uniform grid on [0, 1] with `nodes` nodes.
Vec trapezoid_weights(Eigen::Index nodes);

Vec apply_K1(const Field& z, const SystemDefinition& sys, double dxi);
Vec apply_K2(const Field& z, const SystemDefinition& sys, double dxi);

/// Lumped right-hand side given already-evaluated coupling terms. Shared by
/// the plant and the observer so both use the same arithmetic.
Vec lumped_rhs(const SystemDefinition& sys, const Vec& X, const Vec& k1z, const Vec& k2z,
               const Vec& theta, const Vec& v);

Vec plant_ode_rhs(const PlantState& state, const Vec& U, const SystemDefinition& sys);

/// Theta Sigma(v) z_j + h2(v); the source does not depend on xi.
Vec pde_source(const Vec& zj, const Vec& v, const Vec& theta, const SystemDefinition& sys);

Vec synthesize_Y1(const PlantState& state, const Vec& U, const SystemDefinition& sys);

Vec synthesize_Y2(const Vec& Y1, const Vec& Y1dot, const Vec& theta, const SystemDefinition& sys);

/// Time derivative of Y1 by the chain rule, Dh2(v) (A2 X' + G2 U').
Vec y1_rate(const Vec& v, const Vec& Xdot, const Vec& Udot, const SystemDefinition& sys);

}  // namespace rollobs
