#include "rollobs/identifier.hpp"

#include <cmath>

namespace rollobs {

IdentifierGains IdentifierGains::with_scalar_gamma(Eigen::Index n_z, double rho, double psi, double gamma) {
  return {rho, psi, gamma * Mat::Identity(n_z, n_z)};
}

void IdentifierGains::validate() const {
  if (!(rho > 0.0)) throw ConfigError("filter gain rho must be positive");
  if (!(psi > 0.0)) throw ConfigError("forgetting factor psi must be positive");
  if (Gamma.rows() != Gamma.cols() || Gamma.rows() == 0) throw ConfigError("Gamma must be square");
  if ((Gamma - Gamma.transpose()).norm() > 1e-12 * Gamma.norm()) throw ConfigError("Gamma must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> eig(Gamma, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues().minCoeff() > 0.0)) throw ConfigError("Gamma must be positive definite");
}

RegressionFrame regression_frame(const MeasurementFrame& m, const SystemDefinition& sys) {
  RegressionFrame frame;
  frame.Z1 = m.Y1.sum();
  frame.Z2 = m.Y2.sum();
  const Mat sigma = sys.sigma(sys.h2_inv(m.Y1));
  frame.phi = -(sys.lambda.asDiagonal() * (sigma * m.Y1.cwiseQuotient(sys.lambda)));
  return frame;
}

FilterState step_filters(const FilterState& f, const RegressionFrame& frame, const IdentifierGains& gains,
                         double dt) {
  FilterState next;
  next.zeta1 = f.zeta1 - dt * gains.rho * (f.zeta1 - frame.Z1);
  next.zeta2 = f.zeta2 + dt * (-gains.rho * f.zeta2 + frame.Z2);
  next.varphi = f.varphi + dt * (-gains.rho * f.varphi + frame.phi);
  return next;
}

double nonadaptive_estimate(const Vec& theta_ref, const FilterState& f) { return theta_ref.dot(f.varphi) + f.zeta(); }

Mat excitation_density(const Vec& varphi) { return varphi * varphi.transpose() / (1.0 + varphi.squaredNorm()); }

IdentifierState step_adaptive_law(const IdentifierState& s, const FilterState& f, double Z1,
                                  const IdentifierGains& gains, double dt) {
  const double normalizer = 1.0 + f.varphi.squaredNorm();
  IdentifierState next;
  next.R = s.R + dt * (-gains.psi * s.R + f.varphi * f.varphi.transpose() / normalizer);
  // Symmetric up to rounding; make it exact.
  next.R = 0.5 * (next.R + next.R.transpose()).eval();
  next.Q = s.Q + dt * (-gains.psi * s.Q - (Z1 - f.zeta()) * f.varphi / normalizer);
  next.theta_hat = s.theta_hat - dt * gains.Gamma * (s.R * s.theta_hat + s.Q);
  return next;
}

namespace {

std::size_t window_samples(double window, double dt) {
  if (!(window > 0.0) || !(dt > 0.0)) throw ConfigError("PE window and time step must be positive");
  const long m = std::lround(window / dt);
  if (m < 1) throw ConfigError("PE window is shorter than one time step");
  return static_cast<std::size_t>(m);
}

double min_eigenvalue(const Mat& gram) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(gram, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

}  // namespace

std::optional<double> pe_monitor(std::span<const Vec> history, double window, double dt) {
  const std::size_t m = window_samples(window, dt);
  if (history.size() < m + 1) return std::nullopt;
  const auto recent = history.last(m + 1);
  const auto n = recent.front().size();
  Mat gram = Mat::Zero(n, n);
  for (std::size_t k = 0; k < recent.size(); ++k) {
    const double w = (k == 0 || k == m) ? 0.5 * dt : dt;
    gram += w * excitation_density(recent[k]);
  }
  return min_eigenvalue(gram);
}

PeMonitor::PeMonitor(Eigen::Index n_z, double window, double dt)
    : n_z_(n_z),
      dt_(dt),
      capacity_(window_samples(window, dt) + 1),
      ring_(capacity_ * static_cast<std::size_t>(n_z), 0.0),
      sum_(Mat::Zero(n_z, n_z)) {}

void PeMonitor::push(const Vec& varphi) {
  Eigen::Map<Vec> slot(ring_.data() + head_ * static_cast<std::size_t>(n_z_), n_z_);
  if (count_ == capacity_) sum_ -= excitation_density(slot);
  slot = varphi;
  sum_ += excitation_density(slot);
  head_ = (head_ + 1) % capacity_;
  if (count_ < capacity_) ++count_;
  if (++since_recompute_ >= capacity_) recompute_sum();
}

void PeMonitor::recompute_sum() {
  sum_.setZero();
  for (std::size_t k = 0; k < count_; ++k)
    sum_ += excitation_density(Eigen::Map<const Vec>(ring_.data() + k * static_cast<std::size_t>(n_z_), n_z_));
  since_recompute_ = 0;
}

Mat PeMonitor::gram() const {
  // Oldest sample sits at head_ once the ring is full; newest just before it.
  const std::size_t oldest = head_;
  const std::size_t newest = (head_ + capacity_ - 1) % capacity_;
  const auto at = [&](std::size_t k) {
    return Eigen::Map<const Vec>(ring_.data() + k * static_cast<std::size_t>(n_z_), n_z_);
  };
  return dt_ * (sum_ - 0.5 * (excitation_density(at(oldest)) + excitation_density(at(newest))));
}

std::optional<double> PeMonitor::min_eigenvalue() const {
  if (!ready()) return std::nullopt;
  return rollobs::min_eigenvalue(gram());
}

}  // namespace rollobs
