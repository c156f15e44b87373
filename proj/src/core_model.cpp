#include "rollobs/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rollobs {

namespace {

void require_shape(const Mat& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << name << " has shape " << m.rows() << "x" << m.cols() << ", expected " << rows << "x" << cols;
    throw ConfigError(os.str());
  }
}

void require_size(const Vec& v, Eigen::Index n, const char* name) {
  if (v.size() != n) {
    std::ostringstream os;
    os << name << " has length " << v.size() << ", expected " << n;
    throw ConfigError(os.str());
  }
}

}  // namespace

void SystemDefinition::validate() const {
  const auto nx = n_x();
  const auto nz = n_z();
  const auto nu = n_u();
  if (nx <= 0 || nz <= 0 || nu <= 0) throw ConfigError("system dimensions must be positive");
  require_shape(A1, nx, nx, "A1");
  require_shape(A2, nz, nx, "A2");
  require_shape(G1, nx, nz, "G1");
  require_shape(G2, nz, nu, "G2");
  require_shape(K2, nz, nz, "K2");
  if (!(lambda.array() > 0.0).all() || !lambda.allFinite())
    throw ConfigError("Lambda entries must be strictly positive");
  if (!sigma || !h1 || !h2 || !h2_inv || !K1 || !K3) throw ConfigError("system function left undefined");

  require_shape(K1(0.5), nz, nz, "K1(xi)");
  require_shape(K3(0.5), nz, nz, "K3(xi)");

  // h2_inv must invert h2 on a handful of deterministic sample points.
  for (int k = 0; k < 8; ++k) {
    Vec v(nz);
    for (Eigen::Index i = 0; i < nz; ++i) v[i] = std::sin(1.7 * k + 0.9 * static_cast<double>(i)) * (1.0 + k);
    const Vec hv = h2(v);
    require_size(hv, nz, "h2(v)");
    require_shape(sigma(v), nz, nz, "Sigma(v)");
    require_size(h1(v), nz, "h1(v)");
    const Vec back = h2_inv(hv);
    if ((back - v).norm() > 1e-10 * std::max(1.0, v.norm()))
      throw ConfigError("h2_inv(h2(v)) does not reproduce v");
    if (dh2) require_shape(dh2(v), nz, nz, "Dh2(v)");
  }
}

ThetaSchedule::ThetaSchedule(Vec constant) : ThetaSchedule(std::vector<ThetaPhase>{{0.0, std::move(constant)}}) {}

ThetaSchedule::ThetaSchedule(std::vector<ThetaPhase> phases) : phases_(std::move(phases)) {
  if (phases_.empty()) throw ConfigError("theta schedule is empty");
  if (phases_.front().start != 0.0) throw ConfigError("theta schedule must start at t = 0");
  const auto n = phases_.front().theta.size();
  for (std::size_t k = 0; k < phases_.size(); ++k) {
    const auto& p = phases_[k];
    if (p.theta.size() != n || n == 0) throw ConfigError("theta schedule entries differ in length");
    if (!(p.theta.array() > 0.0).all() || !p.theta.allFinite())
      throw ConfigError("theta schedule entries must be strictly positive");
    if (k > 0 && !(p.start > phases_[k - 1].start))
      throw ConfigError("theta schedule times must be strictly increasing");
  }
}

const Vec& ThetaSchedule::at(double t) const {
  auto it = std::upper_bound(phases_.begin(), phases_.end(), t,
                             [](double value, const ThetaPhase& p) { return value < p.start; });
  if (it == phases_.begin()) return phases_.front().theta;
  return std::prev(it)->theta;
}

Vec relative_velocity(const Vec& X, const Vec& U, const SystemDefinition& sys) {
  if (X.size() != sys.n_x() || U.size() != sys.n_u())
    throw ConfigError("relative_velocity: state or input dimension does not match the system");
  return sys.A2 * X + sys.G2 * U;
}

Vec trapezoid_weights(Eigen::Index nodes) {
  if (nodes < 2) throw ConfigError("trapezoid rule needs at least two nodes");
  const double h = 1.0 / static_cast<double>(nodes - 1);
  Vec w = Vec::Constant(nodes, h);
  w[0] = w[nodes - 1] = 0.5 * h;
  return w;
}

namespace {

Vec integrate_kernel(const std::function<Mat(double)>& kernel, const Field& z, double dxi) {
  const auto nodes = z.cols();
  if (std::abs(dxi * static_cast<double>(nodes - 1) - 1.0) > 1e-9)
    throw ConfigError("field does not span [0, 1] with the given dxi");
  const Vec w = trapezoid_weights(nodes);
  Vec acc = Vec::Zero(z.rows());
  for (Eigen::Index j = 0; j < nodes; ++j) acc += w[j] * (kernel(static_cast<double>(j) / static_cast<double>(nodes - 1)) * z.col(j));
  return acc;
}

}  // namespace

Vec apply_K1(const Field& z, const SystemDefinition& sys, double dxi) {
  if (z.rows() != sys.n_z()) throw ConfigError("apply_K1: field has wrong number of components");
  return integrate_kernel(sys.K1, z, dxi) + sys.K2 * z.col(z.cols() - 1);
}

Vec apply_K2(const Field& z, const SystemDefinition& sys, double dxi) {
  if (z.rows() != sys.n_z()) throw ConfigError("apply_K2: field has wrong number of components");
  return integrate_kernel(sys.K3, z, dxi);
}

Vec lumped_rhs(const SystemDefinition& sys, const Vec& X, const Vec& k1z, const Vec& k2z, const Vec& theta,
               const Vec& v) {
  Vec coupling = k1z + theta.asDiagonal() * (sys.sigma(v) * k2z) + sys.h1(v);
  return sys.A1 * X + sys.G1 * coupling;
}

Vec plant_ode_rhs(const PlantState& state, const Vec& U, const SystemDefinition& sys) {
  const double dxi = 1.0 / static_cast<double>(state.z.cols() - 1);
  const Vec v = relative_velocity(state.X, U, sys);
  Vec rhs = lumped_rhs(sys, state.X, apply_K1(state.z, sys, dxi), apply_K2(state.z, sys, dxi), state.theta_now(), v);
  if (!rhs.allFinite()) throw BlowUpError("plant ODE right-hand side", state.t);
  return rhs;
}

Vec pde_source(const Vec& zj, const Vec& v, const Vec& theta, const SystemDefinition& sys) {
  return theta.asDiagonal() * (sys.sigma(v) * zj) + sys.h2(v);
}

Vec synthesize_Y1(const PlantState& state, const Vec& U, const SystemDefinition& sys) {
  return sys.h2(relative_velocity(state.X, U, sys));
}

Vec synthesize_Y2(const Vec& Y1, const Vec& Y1dot, const Vec& theta, const SystemDefinition& sys) {
  const Mat sigma = sys.sigma(sys.h2_inv(Y1));
  const Vec scaled = Y1.cwiseQuotient(sys.lambda);
  return theta.asDiagonal() * (sys.lambda.asDiagonal() * (sigma * scaled)) + Y1dot;
}

Vec y1_rate(const Vec& v, const Vec& Xdot, const Vec& Udot, const SystemDefinition& sys) {
  if (!sys.dh2) throw ConfigError("analytic Y1 rate needs the Jacobian Dh2");
  return sys.dh2(v) * (sys.A2 * Xdot + sys.G2 * Udot);
}

}  // namespace rollobs
