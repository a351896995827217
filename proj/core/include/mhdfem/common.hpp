#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace mhdfem {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vector = Eigen::VectorXd;

/// Barycentric coordinates of a point in a simplex (entries beyond dim+1 are zero).
using Bary = Eigen::Vector4d;

/// Invalid user input: bad mesh parameters, malformed config, inconsistent physics.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments that do not belong together (wrong family, wrong dimension).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A linear or nonlinear solve that did not succeed.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for operations that have no meaning in the current spatial dimension.
class UnsupportedDimension : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A physical constraint on the discrete state was violated (e.g. nonpositive density).
class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read or written; the message names the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.141592653589793238462643383279502884;

}  // namespace mhdfem
