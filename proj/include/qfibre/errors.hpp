#pragma once

#include <stdexcept>
#include <string>

namespace qfibre {

// Base class for everything thrown by this library, so callers can catch
// one type at the CLI boundary and map it to an exit code.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionError : Error {
  using Error::Error;
};
struct HermiticityError : Error {
  using Error::Error;
};
struct UnitarityError : Error {
  using Error::Error;
};
struct UnitsError : Error {
  using Error::Error;
};
struct ZeroNormError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct MethodMismatchError : Error {
  using Error::Error;
};
struct BasePointError : Error {
  using Error::Error;
};
struct MorphismError : Error {
  using Error::Error;
};
struct SingularFrameError : Error {
  using Error::Error;
};

// Config errors carry location info in the message (line number or key).
struct ConfigSyntaxError : Error {
  using Error::Error;
};
struct ConfigValidationError : Error {
  using Error::Error;
};

}  // namespace qfibre
