#pragma once

#include <stdexcept>
#include <string>

namespace gmc {

struct InvalidDimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidWeightsError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SingularBasisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroMatrixError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DimensionCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptySampleError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct PartitionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InfeasibleProblemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidConfidenceError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct MemoryGuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gmc
