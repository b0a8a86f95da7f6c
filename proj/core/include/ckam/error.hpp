#pragma once

#include <stdexcept>
#include <string>

namespace ckam {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A structural assumption on H or F does not hold; `witness` names the sample.
class AssumptionViolation : public Error {
 public:
  AssumptionViolation(std::string assumption, std::string witness)
      : Error(assumption + " violated: " + witness),
        assumption_(std::move(assumption)),
        witness_(std::move(witness)) {}

  const std::string& assumption() const noexcept { return assumption_; }
  const std::string& witness() const noexcept { return witness_; }

 private:
  std::string assumption_;
  std::string witness_;
};

/// Solver parameters that break a scheme requirement (e.g. dt * lambda >= 1).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Malformed run configuration; `path` is the offending JSON field.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// The extracted Mather set came back empty at the requested tolerances.
class EmptyKSetError : public Error {
 public:
  EmptyKSetError(double min_h_residual, double min_grad_residual)
      : Error("K-set is empty at the requested tolerances (min H-residual " +
              std::to_string(min_h_residual) + ", min gradient " +
              std::to_string(min_grad_residual) + ")"),
        min_h_residual_(min_h_residual),
        min_grad_residual_(min_grad_residual) {}

  double min_h_residual() const noexcept { return min_h_residual_; }
  double min_grad_residual() const noexcept { return min_grad_residual_; }

 private:
  double min_h_residual_;
  double min_grad_residual_;
};

/// An ODE orbit left the a-priori box.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace ckam
