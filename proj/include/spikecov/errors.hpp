#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace spikecov {

// Bad arguments or a configuration the model cannot represent
// (degrees of freedom too small, K out of range, malformed config).
class InvalidConfiguration : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or unusable input data (CSV parse errors, too few rows).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical routine could not produce a valid result.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a bias-correction factor is nonpositive for one or more
// spike indices (1-based).
class CorrectionInfeasible : public NumericalFailure {
 public:
  CorrectionInfeasible(const std::string& what, std::vector<int> indices)
      : NumericalFailure(what), indices_(std::move(indices)) {}

  const std::vector<int>& indices() const noexcept { return indices_; }

 private:
  std::vector<int> indices_;
};

}  // namespace spikecov
