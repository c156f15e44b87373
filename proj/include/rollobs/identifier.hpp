#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rollobs/core_model.hpp"

namespace rollobs {

// Linear parametric model dZ1/dt = theta^T phi + Z2 built from the boundary
// measurements.
struct RegressionFrame {
  double Z1 = 0.0;
  double Z2 = 0.0;
  Vec phi;
};

struct FilterState {
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  Vec varphi;

  double zeta() const { return zeta1 + zeta2; }

  static FilterState zero(Eigen::Index n_z) { return {0.0, 0.0, Vec::Zero(n_z)}; }
};

struct IdentifierState {
  Vec theta_hat;
  Mat R;
  Vec Q;

  static IdentifierState initial(const Vec& theta_hat0) {
    const auto n = theta_hat0.size();
    return {theta_hat0, Mat::Zero(n, n), Vec::Zero(n)};
  }
};

struct IdentifierGains {
  double rho = 20.0;
  double psi = 50.0;
  Mat Gamma;

  static IdentifierGains with_scalar_gamma(Eigen::Index n_z, double rho, double psi, double gamma);
  void validate() const;
};

RegressionFrame regression_frame(const MeasurementFrame& m, const SystemDefinition& sys);

FilterState step_filters(const FilterState& f, const RegressionFrame& frame, const IdentifierGains& gains,
                         double dt);

/// theta_ref^T varphi + zeta1 + zeta2.
double nonadaptive_estimate(const Vec& theta_ref, const FilterState& f);

/// One explicit step of the gradient law with integral cost and forgetting.
/// R, Q and theta_hat are all advanced from their pre-step values.
IdentifierState step_adaptive_law(const IdentifierState& s, const FilterState& f, double Z1,
                                  const IdentifierGains& gains, double dt);

/// Normalized regressor outer product varphi varphi^T / (1 + |varphi|^2).
Mat excitation_density(const Vec& varphi);

/// Smallest eigenvalue of the trapezoid integral of excitation_density over
/// the last `window` seconds of `history` (uniformly sampled at dt, newest
/// last). Empty when the history is shorter than the window.
std::optional<double> pe_monitor(std::span<const Vec> history, double window, double dt);

/// Streaming version of pe_monitor backed by a ring buffer of the last
/// window/dt + 1 samples.
class PeMonitor {
 public:
  PeMonitor(Eigen::Index n_z, double window, double dt);

  void push(const Vec& varphi);
  bool ready() const { return count_ >= capacity_; }
  std::optional<double> min_eigenvalue() const;
  Mat gram() const;

 private:
  void recompute_sum();

  Eigen::Index n_z_;
  double dt_;
  std::size_t capacity_;
  std::vector<double> ring_;  // capacity_ x n_z_
  std::size_t head_ = 0;      // next slot to write
  std::size_t count_ = 0;
  std::size_t since_recompute_ = 0;
  Mat sum_;
};

}  // namespace rollobs
