#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace curex {

// Input/validation failures; the CLI maps these to exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Estimation/runtime failures; the CLI maps these to exit code 3.
struct EstimationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptySample : InputError {
  EmptySample() : InputError("sample contains no observations") {}
};

struct NegativeTime : InputError {
  explicit NegativeTime(double t)
      : InputError("negative observation time: " + std::to_string(t)) {}
};

struct NonFiniteTime : InputError {
  NonFiniteTime() : InputError("non-finite observation time") {}
};

struct EndpointNotAbove : InputError {
  EndpointNotAbove(double tau0, double t)
      : InputError("endpoint tau0 = " + std::to_string(tau0) +
                    " does not exceed observed time " + std::to_string(t)) {}
};

struct FileNotFound : InputError {
  explicit FileNotFound(const std::string& path)
      : InputError("file not found: " + path) {}
};

struct MalformedHeader : InputError {
  explicit MalformedHeader(const std::string& detail)
      : InputError("malformed CSV header: " + detail) {}
};

struct BadRow : InputError {
  BadRow(std::size_t line_number, const std::string& reason)
      : InputError("bad row at line " + std::to_string(line_number) + ": " + reason),
        line(line_number) {}
  std::size_t line;
};

struct EmptyGroup : InputError {
  explicit EmptyGroup(const std::string& label)
      : InputError("group has no observations: " + label) {}
};

struct BadConfig : InputError {
  explicit BadConfig(const std::string& config_key)
      : InputError("bad configuration key: " + config_key), key(config_key) {}
  std::string key;
};

struct DegenerateDenominator : EstimationError {
  DegenerateDenominator() : EstimationError("degenerate denominator") {}
};

struct PointBeyondData : EstimationError {
  explicit PointBeyondData(double t)
      : EstimationError("evaluation point beyond largest observation: " +
                        std::to_string(t)) {}
};

struct QuadratureFailure : EstimationError {
  QuadratureFailure() : EstimationError("quadrature did not converge") {}
};

}  // namespace curex
