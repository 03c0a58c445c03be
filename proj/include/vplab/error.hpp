#pragma once

#include <stdexcept>
#include <string>

namespace vplab {

// Malformed configuration or CLI input. Precondition violations inside the
// library throw std::invalid_argument instead.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A computation that could not produce a trustworthy result: quadrature step
// underflow, Newton failure, NaN in a simulation, rank-deficient fit.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace vplab
