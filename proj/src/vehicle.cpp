#include "rollobs/vehicle.hpp"

#include <cmath>
#include <sstream>

namespace rollobs::vehicle {

ThetaSchedule benchmark_theta_schedule() {
  return ThetaSchedule(std::vector<ThetaPhase>{{0.0, Eigen::Vector2d(1.2, 0.8)}, {5.0, Eigen::Vector2d(0.6, 0.4)}});
}

void VehicleParams::validate() const {
  const std::pair<const char*, double> positive[] = {
      {"v_x", v_x},       {"m", m},         {"I_z", I_z},     {"l1", l1},   {"l2", l2},   {"L1", L1_patch},
      {"L2", L2_patch},   {"sigma1", sigma1}, {"sigma2", sigma2}, {"p01", p01}, {"p02", p02}};
  for (const auto& [name, value] : positive) {
    if (!(value > 0.0) || !std::isfinite(value))
      throw ConfigError(std::string("vehicle parameter ") + name + " must be strictly positive");
  }
  if (!(a1 >= 0.0) || !(a2 >= 0.0)) throw ConfigError("pressure decay rates a1, a2 must be non-negative");
  if (!(smoothing_eps >= 0.0)) throw ConfigError("smoothing_eps must be non-negative");
  if (!mu1 || !mu2) throw ConfigError("friction coefficient functions must be set");
  for (int k = -100; k <= 100; ++k) {
    const double v = 0.5 * k;
    if (!(mu1(v) > 0.0) || !(mu2(v) > 0.0)) throw ConfigError("friction coefficients must stay positive");
  }
  if (theta_schedule.size() != 2) throw ConfigError("vehicle theta schedule must have two components");
}

SteeringSpec SteeringSpec::benchmark() { return {{{0.05, 2.0}, {0.01, 4.0}}, {}}; }

double pressure_profile(double xi, double p0, double a) {
  if (!(xi >= 0.0 && xi <= 1.0)) {
    std::ostringstream os;
    os << "pressure_profile: xi = " << xi << " outside [0, 1]";
    throw DomainError(os.str());
  }
  return p0 * std::exp(-a * xi);
}

double smooth_abs(double x, double eps) {
  if (eps == 0.0) return std::abs(x);
  return std::sqrt(x * x + eps * eps) - eps;
}

Mat sigma_matrix(const Vec& v, const VehicleParams& p) {
  const double mu1 = p.mu1(v[0]);
  const double mu2 = p.mu2(v[1]);
  if (!(mu1 > 0.0) || !(mu2 > 0.0)) throw DomainError("friction coefficient is not positive");
  Mat sigma = Mat::Zero(2, 2);
  sigma(0, 0) = -p.sigma1 * smooth_abs(v[0], p.smoothing_eps) / mu1;
  sigma(1, 1) = -p.sigma2 * smooth_abs(v[1], p.smoothing_eps) / mu2;
  return sigma;
}

SystemDefinition build_vehicle_system(const VehicleParams& p) {
  p.validate();
  SystemDefinition sys;
  sys.A1.resize(2, 2);
  sys.A1 << 0.0, -p.v_x, 0.0, 0.0;
  sys.A2.resize(2, 2);
  sys.A2 << 1.0, p.l1, 1.0, -p.l2;
  sys.G1.resize(2, 2);
  sys.G1 << -1.0 / p.m, -1.0 / p.m, -p.l1 / p.I_z, p.l2 / p.I_z;
  sys.G2 = -p.v_x * Mat::Identity(2, 2);
  sys.lambda = Eigen::Vector2d(p.v_x / p.L1_patch, p.v_x / p.L2_patch);

  sys.sigma = [p](const Vec& v) { return sigma_matrix(v, p); };
  sys.h1 = [](const Vec& v) -> Vec { return Vec::Zero(v.size()); };
  sys.h2 = [](const Vec& v) -> Vec { return 2.0 * v; };
  sys.h2_inv = [](const Vec& y) -> Vec { return 0.5 * y; };
  sys.dh2 = [](const Vec& v) -> Mat { return 2.0 * Mat::Identity(v.size(), v.size()); };

  const double c1 = p.L1_patch * p.sigma1;
  const double c2 = p.L2_patch * p.sigma2;
  sys.K1 = [=](double xi) -> Mat {
    Mat k = Mat::Zero(2, 2);
    k(0, 0) = c1 * pressure_profile(xi, p.p01, p.a1);
    k(1, 1) = c2 * pressure_profile(xi, p.p02, p.a2);
    return k;
  };
  sys.K2 = Mat::Zero(2, 2);
  sys.K3 = [](double) -> Mat { return Mat::Zero(2, 2); };
  sys.validate();
  return sys;
}

SteeringSample steering_input(double t, const SteeringSpec& spec) {
  SteeringSample s{Vec::Zero(2), Vec::Zero(2)};
  const std::vector<SineTerm>* channels[] = {&spec.delta1, &spec.delta2};
  for (int i = 0; i < 2; ++i) {
    for (const auto& term : *channels[i]) {
      s.value[i] += term.amplitude * std::sin(term.frequency * t);
      s.derivative[i] += term.amplitude * term.frequency * std::cos(term.frequency * t);
    }
  }
  return s;
}

InputSignal steering_signal(const SteeringSpec& spec) {
  return {[spec](double t) { return steering_input(t, spec).value; },
          [spec](double t) { return steering_input(t, spec).derivative; }};
}

std::pair<double, double> tire_forces(const Field& z, const VehicleParams& p) {
  if (z.rows() != 2) throw ConfigError("tire_forces expects a two-component field");
  const Vec w = trapezoid_weights(z.cols());
  double f1 = 0.0;
  double f2 = 0.0;
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    const double xi = static_cast<double>(j) / static_cast<double>(z.cols() - 1);
    f1 += w[j] * pressure_profile(xi, p.p01, p.a1) * p.sigma1 * z(0, j);
    f2 += w[j] * pressure_profile(xi, p.p02, p.a2) * p.sigma2 * z(1, j);
  }
  return {p.L1_patch * f1, p.L2_patch * f2};
}

}  // namespace rollobs::vehicle
