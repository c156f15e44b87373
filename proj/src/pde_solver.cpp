#include "rollobs/pde_solver.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace rollobs {

void Grid::validate() const {
  if (cells < 2) throw ConfigError("grid needs at least 2 cells, got " + std::to_string(cells));
}

Scheme parse_scheme(std::string_view name) {
  if (name == "explicit-euler") return Scheme::ExplicitEuler;
  if (name == "rk4") return Scheme::Rk4;
  throw ConfigError("unknown scheme '" + std::string(name) + "' (expected explicit-euler or rk4)");
}

std::string_view scheme_name(Scheme scheme) {
  return scheme == Scheme::Rk4 ? "rk4" : "explicit-euler";
}

namespace {

Mat stack_kernel(const std::function<Mat(double)>& kernel, const Grid& grid, Eigen::Index nz) {
  const Vec w = trapezoid_weights(grid.nodes());
  Mat stacked(nz, nz * grid.nodes());
  for (Eigen::Index j = 0; j < grid.nodes(); ++j) stacked.middleCols(j * nz, nz) = w[j] * kernel(grid.xi(j));
  return stacked;
}

Eigen::Map<const Vec> flatten(const Field& z) { return {z.data(), z.size()}; }

}  // namespace

DiscreteModel::DiscreteModel(SystemDefinition sys, Grid grid) : sys_(std::move(sys)), grid_(grid) {
  grid_.validate();
  sys_.validate();
  k1_stacked_ = stack_kernel(sys_.K1, grid_, sys_.n_z());
  k3_stacked_ = stack_kernel(sys_.K3, grid_, sys_.n_z());
}

Vec DiscreteModel::K1(const Field& z) const { return k1_stacked_ * flatten(z) + sys_.K2 * z.col(z.cols() - 1); }

Vec DiscreteModel::K2(const Field& z) const { return k3_stacked_ * flatten(z); }

Field upwind_transport(const Field& z, const Vec& lambda, double dxi) {
  Field out = Field::Zero(z.rows(), z.cols());
  const auto n = z.cols() - 1;
  out.rightCols(n) = (lambda / dxi).asDiagonal() * (z.rightCols(n) - z.leftCols(n));
  return out;
}

double cfl_check(const Vec& lambda, double dt, double dxi) { return lambda.maxCoeff() * dt / dxi; }

void require_cfl(const Vec& lambda, const StepperConfig& cfg, double dxi) {
  if (!(cfg.dt > 0.0)) throw ConfigError("time step must be positive");
  const double courant = cfl_check(lambda, cfg.dt, dxi);
  if (courant > cfg.cfl_limit) {
    std::ostringstream os;
    os << "CFL condition violated: Courant number " << courant << " exceeds limit " << cfg.cfl_limit;
    throw ConfigError(os.str());
  }
}

double field_l2_squared(const Field& z, double dxi) {
  const auto n = z.cols();
  const Vec sq = z.colwise().squaredNorm().transpose();
  return dxi * (sq.sum() - 0.5 * (sq[0] + sq[n - 1]));
}

double norm_X(const Vec& X, const Field& z, double dxi) {
  return std::sqrt(X.squaredNorm() + field_l2_squared(z, dxi));
}

double norm_Y(const Vec& X, const Field& z, double dxi) {
  const auto n = z.cols();
  Field dz(z.rows(), n);
  dz.col(0) = (z.col(1) - z.col(0)) / dxi;
  dz.col(n - 1) = (z.col(n - 1) - z.col(n - 2)) / dxi;
  if (n > 2) dz.middleCols(1, n - 2) = (z.rightCols(n - 2) - z.leftCols(n - 2)) / (2.0 * dxi);
  return std::sqrt(X.squaredNorm() + field_l2_squared(z, dxi) + field_l2_squared(dz, dxi));
}

namespace {

struct PlantRates {
  Vec dX;
  Field dz;
};

PlantRates plant_rates(const DiscreteModel& model, const Vec& X, const Field& z, const Vec& U, const Vec& theta) {
  const auto& sys = model.system();
  const double dxi = model.grid().dxi();
  const Vec v = sys.A2 * X + sys.G2 * U;
  PlantRates r;
  r.dX = lumped_rhs(sys, X, model.K1(z), model.K2(z), theta, v);
  const Mat source = theta.asDiagonal() * sys.sigma(v);
  r.dz = source * z - upwind_transport(z, sys.lambda, dxi);
  r.dz.colwise() += sys.h2(v);
  r.dz.col(0).setZero();
  return r;
}

void check_finite(const PlantState& s) {
  if (!s.X.allFinite()) throw BlowUpError("plant lumped state X", s.t);
  if (!s.z.allFinite()) throw BlowUpError("plant distributed state z", s.t);
}

}  // namespace

void advance_plant(PlantState& state, const InputSignal& input, const DiscreteModel& model,
                   const StepperConfig& cfg) {
  const double dxi = model.grid().dxi();
  require_cfl(model.system().lambda, cfg, dxi);
  if (state.z.cols() != model.grid().nodes() || state.z.rows() != model.system().n_z())
    throw ConfigError("plant field does not match the model grid");

  const double t = state.t;
  const double dt = cfg.dt;
  const Vec& theta = state.theta_now();

  if (cfg.scheme == Scheme::ExplicitEuler) {
    const PlantRates k = plant_rates(model, state.X, state.z, input.value(t), theta);
    state.X += dt * k.dX;
    state.z += dt * k.dz;
  } else {
    const Vec U0 = input.value(t);
    const Vec Uh = input.value(t + 0.5 * dt);
    const Vec U1 = input.value(t + dt);
    const PlantRates k1 = plant_rates(model, state.X, state.z, U0, theta);
    const PlantRates k2 =
        plant_rates(model, state.X + 0.5 * dt * k1.dX, state.z + 0.5 * dt * k1.dz, Uh, theta);
    const PlantRates k3 =
        plant_rates(model, state.X + 0.5 * dt * k2.dX, state.z + 0.5 * dt * k2.dz, Uh, theta);
    const PlantRates k4 = plant_rates(model, state.X + dt * k3.dX, state.z + dt * k3.dz, U1, theta);
    state.X += (dt / 6.0) * (k1.dX + 2.0 * k2.dX + 2.0 * k3.dX + k4.dX);
    state.z += (dt / 6.0) * (k1.dz + 2.0 * k2.dz + 2.0 * k3.dz + k4.dz);
  }
  state.z.col(0).setZero();
  state.t = t + dt;
  check_finite(state);
}

PlantState step_plant(const PlantState& state, const InputSignal& input, const DiscreteModel& model,
                      const StepperConfig& cfg) {
  PlantState next = state;
  advance_plant(next, input, model, cfg);
  return next;
}

}  // namespace rollobs
