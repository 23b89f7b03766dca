#pragma once

#include <stdexcept>
#include <string>

namespace henon {

/// Base for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: a violated precondition or malformed configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An iterative method failed to reach its tolerance.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, int iterations, double residual)
      : Error(what + " (iterations=" + std::to_string(iterations) +
              ", residual=" + std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}

  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

}  // namespace henon
