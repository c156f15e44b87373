#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "rollobs/config.hpp"
#include "rollobs/pde_solver.hpp"
#include "rollobs/vehicle.hpp"

namespace rollobs::testing {

// Scalar or vector transport with a linear source and no lumped coupling:
// n_x = n_u = n_z, A1 = A2 = G1 = G2 = 0 unless overwritten.
inline SystemDefinition transport_system(Eigen::Index n, double lambda, double sigma = 0.0) {
  SystemDefinition s;
  s.A1 = Mat::Zero(n, n);
  s.A2 = Mat::Zero(n, n);
  s.G1 = Mat::Zero(n, n);
  s.G2 = Mat::Zero(n, n);
  s.lambda = Vec::Constant(n, lambda);
  s.sigma = [n, sigma](const Vec&) { return Mat(sigma * Mat::Identity(n, n)); };
  s.h1 = [n](const Vec&) { return Vec(Vec::Zero(n)); };
  s.h2 = [](const Vec& v) { return v; };
  s.h2_inv = [](const Vec& y) { return y; };
  s.dh2 = [n](const Vec&) { return Mat(Mat::Identity(n, n)); };
  s.K1 = [n](double) { return Mat(Mat::Zero(n, n)); };
  s.K2 = Mat::Zero(n, n);
  s.K3 = [n](double) { return Mat(Mat::Zero(n, n)); };
  return s;
}

inline InputSignal zero_input(Eigen::Index n) {
  return {[n](double) { return Vec(Vec::Zero(n)); }, [n](double) { return Vec(Vec::Zero(n)); }};
}

inline InputSignal constant_input(const Vec& u) {
  const Eigen::Index n = u.size();
  return {[u](double) { return u; }, [n](double) { return Vec(Vec::Zero(n)); }};
}

inline SystemDefinition vehicle_system() { return vehicle::build_vehicle_system(vehicle::VehicleParams{}); }

inline Field constant_field(const Vec& c, const Grid& g) { return c.replicate(1, g.nodes()); }

inline Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("rollobs_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Short run of the benchmark used by several integration tests.
inline ScenarioConfig short_benchmark(double t_end) {
  ScenarioConfig cfg = default_config();
  cfg.t_end = t_end;
  cfg.snapshot_times = {0.0};
  return cfg;
}

}  // namespace rollobs::testing
