#pragma once

#include <stdexcept>
#include <string>

namespace merlin {

/// Covariance of the three-variable system is singular or close enough to it
/// (condition number above 1e12) that inverting it would be meaningless.
class SingularCovarianceError : public std::runtime_error {
public:
  explicit SingularCovarianceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// An objective or gradient evaluated to NaN/Inf, or another numerical
/// operation produced an unusable result.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace merlin
