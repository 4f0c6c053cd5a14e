#pragma once

#include <stdexcept>
#include <string>

namespace nasela {

/// Base class for all library errors. `kind()` is a stable machine-readable tag.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

#define NASELA_DEFINE_ERROR(Name)                                              \
  class Name : public Error {                                                  \
  public:                                                                      \
    explicit Name(const std::string& what) : Error(#Name, what) {}             \
  };

NASELA_DEFINE_ERROR(OutOfBounds)
NASELA_DEFINE_ERROR(InsufficientData)
NASELA_DEFINE_ERROR(DegenerateSample)
NASELA_DEFINE_ERROR(SingularFit)
NASELA_DEFINE_ERROR(UnknownFunction)
NASELA_DEFINE_ERROR(DimensionMismatch)
NASELA_DEFINE_ERROR(NonFiniteInput)
NASELA_DEFINE_ERROR(InvalidArgument)
NASELA_DEFINE_ERROR(SchemaError)

#undef NASELA_DEFINE_ERROR

} // namespace nasela
