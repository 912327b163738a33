#pragma once

#include <stdexcept>
#include <string>

namespace einstab {

/// Base class for all domain errors raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RangeError : Error {
  using Error::Error;
};

/// Input did not match the lie_algebra.json schema; `pointer` locates the offending node.
struct SchemaError : Error {
  std::string pointer;
  SchemaError(const std::string& ptr, const std::string& what)
      : Error(ptr + ": " + what), pointer(ptr) {}
};

struct NotASubalgebra : Error {
  using Error::Error;
};
struct DegenerateRestriction : Error {
  using Error::Error;
};
struct NotUnimodular : Error {
  using Error::Error;
};
struct NotEinstein : Error {
  using Error::Error;
};
struct NotNaturallyReductive : Error {
  using Error::Error;
};
struct NotMultiplicityFree : Error {
  using Error::Error;
};
struct KillingNotDefinite : Error {
  using Error::Error;
};
struct BasisMismatch : Error {
  using Error::Error;
};
struct NotEinsteinProduct : Error {
  using Error::Error;
};
struct StepTooLarge : Error {
  using Error::Error;
};
struct DecompositionUnstable : Error {
  using Error::Error;
};
struct NonUniformC : Error {
  using Error::Error;
};
struct SingularH : Error {
  using Error::Error;
};
struct ModelTooLarge : Error {
  using Error::Error;
};

}  // namespace einstab
