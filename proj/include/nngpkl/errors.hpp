#pragma once

#include <stdexcept>
#include <string>

namespace nngpkl {

// Base for every numerical/domain failure raised by this library. Precondition
// violations that indicate caller bugs (bad sample counts, negative variances)
// throw std::invalid_argument instead.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A Cholesky pivot (or conditional variance) came out <= 0. No jitter is ever
// added: the inputs here are exact covariances, so a failure means the input
// itself is not positive definite.
struct NotPositiveDefinite : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

// Symmetric eigensolver exceeded its iteration cap.
struct ConvergenceFailure : Error {
  using Error::Error;
};

// A correlation triple violates the positive-definiteness condition of the
// 3x3 unit-diagonal correlation matrix.
struct InvalidCorrelation : Error {
  using Error::Error;
};

struct InvalidPermutation : Error {
  using Error::Error;
};

// Malformed input file (locations CSV, sweep grid).
struct IoError : Error {
  using Error::Error;
};

}  // namespace nngpkl
