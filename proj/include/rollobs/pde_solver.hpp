#pragma once

#include <string_view>

#include "rollobs/core_model.hpp"

namespace rollobs {

struct Grid {
  int cells = 50;

  double dxi() const { return 1.0 / cells; }
  Eigen::Index nodes() const { return cells + 1; }
  double xi(Eigen::Index j) const { return static_cast<double>(j) / cells; }
  void validate() const;
};

enum class Scheme { ExplicitEuler, Rk4 };

Scheme parse_scheme(std::string_view name);
std::string_view scheme_name(Scheme scheme);

struct StepperConfig {
  double dt = 1e-5;
  Scheme scheme = Scheme::ExplicitEuler;
  double cfl_limit = 1.0;
};

/// A system bound to a grid, with the coupling kernels pre-sampled at the
/// nodes and folded into the trapezoid weights.
class DiscreteModel {
 public:
  DiscreteModel(SystemDefinition sys, Grid grid);

  const SystemDefinition& system() const { return sys_; }
  const Grid& grid() const { return grid_; }

  Vec K1(const Field& z) const;
  Vec K2(const Field& z) const;

  Field zero_field() const { return Field::Zero(sys_.n_z(), grid_.nodes()); }

 private:
  SystemDefinition sys_;
  Grid grid_;
  Mat k1_stacked_;  // [w_0 K1(xi_0) ... w_N K1(xi_N)]
  Mat k3_stacked_;
};

/// Backward-difference transport term Lambda (z_j - z_{j-1}) / dxi; column 0
/// is left at zero because the inflow node is pinned.
Field upwind_transport(const Field& z, const Vec& lambda, double dxi);

double cfl_check(const Vec& lambda, double dt, double dxi);

/// Throws ConfigError when the Courant number exceeds the configured limit.
void require_cfl(const Vec& lambda, const StepperConfig& cfg, double dxi);

/// Trapezoid integral of ||z(xi)||^2 over [0, 1].
double field_l2_squared(const Field& z, double dxi);

double norm_X(const Vec& X, const Field& z, double dxi);
double norm_Y(const Vec& X, const Field& z, double dxi);

/// Advances X and z by one step of the configured scheme. Theta is taken at
/// the pre-step time and held across stages; U is evaluated at stage times.
void advance_plant(PlantState& state, const InputSignal& input, const DiscreteModel& model,
                   const StepperConfig& cfg);

PlantState step_plant(const PlantState& state, const InputSignal& input, const DiscreteModel& model,
                      const StepperConfig& cfg);

}  // namespace rollobs
