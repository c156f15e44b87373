#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rollobs {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Distributed state sampled on the grid: column j holds z(xi_j), one row per
// component. Column-major storage makes the whole field contiguous node by node.
using Field = Eigen::MatrixXd;

// Invalid dimensions, gains, schedules or configuration values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A state component became non-finite during time stepping.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& field, double t)
      : std::runtime_error("non-finite value in " + field + " at t = " + std::to_string(t)),
        field_(field),
        t_(t) {}

  const std::string& field() const { return field_; }
  double time() const { return t_; }

 private:
  std::string field_;
  double t_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Observer gain synthesis is not possible for the supplied matrices.
class DesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a function (e.g. xi outside [0, 1]).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace rollobs
