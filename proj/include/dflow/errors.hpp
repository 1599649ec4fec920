#pragma once

#include <stdexcept>
#include <string>

namespace dflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

class InvalidInput : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid_input"; }
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "dimension_mismatch"; }
};

class SolverFailure : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "solver_failure"; }
};

class NotApplicable : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "not_applicable"; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config_error"; }
};

}  // namespace dflow
