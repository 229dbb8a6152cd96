#pragma once

#include <stdexcept>
#include <string>

namespace crc {

/// Base of every exception thrown by the library. Subclasses name the
/// failure class so callers (and the CLI exit-code mapping) can dispatch on it.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define CRC_DECLARE_ERROR(Name)              \
  class Name : public Error {                \
   public:                                   \
    explicit Name(const std::string& what)   \
        : Error(#Name ": " + what) {}        \
  }

CRC_DECLARE_ERROR(ShapeMismatch);
CRC_DECLARE_ERROR(NonFinite);
CRC_DECLARE_ERROR(MissingTarget);
CRC_DECLARE_ERROR(ParseError);
CRC_DECLARE_ERROR(InsufficientRows);
CRC_DECLARE_ERROR(UnstableSystem);
CRC_DECLARE_ERROR(DegenerateSeries);
CRC_DECLARE_ERROR(SingularSystem);
CRC_DECLARE_ERROR(NonFiniteLoss);
CRC_DECLARE_ERROR(EmptyValidation);
CRC_DECLARE_ERROR(ConfigError);
CRC_DECLARE_ERROR(StaleInput);
CRC_DECLARE_ERROR(MissingStage);

#undef CRC_DECLARE_ERROR

}  // namespace crc
