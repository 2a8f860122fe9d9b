#pragma once

#include <stdexcept>
#include <string>

namespace fiberuq {

// Base for every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File loading / saving failures (missing files, size mismatches, bad values).
struct IoError : Error {
  using Error::Error;
};

// Trait polygon violates its invariants (too few vertices, zero area, self-intersection).
struct InvalidTrait : Error {
  using Error::Error;
};

// Bad argument combination or out-of-domain parameter.
struct InvalidArgument : Error {
  using Error::Error;
};

// Sample set has no spread; caller is expected to substitute the floor bandwidth.
struct DegenerateSamples : Error {
  using Error::Error;
};

// A numerically computed probability left [-1e-9, 1 + 1e-9].
struct ConsistencyError : Error {
  using Error::Error;
};

// Grids of two volumes do not match.
struct GridMismatch : Error {
  using Error::Error;
};

}  // namespace fiberuq
