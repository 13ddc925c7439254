#pragma once

#include <stdexcept>
#include <string>

namespace momentlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MOMENTLAB_DEFINE_ERROR(Name)              \
  class Name : public Error {                     \
   public:                                        \
    explicit Name(const std::string& what)        \
        : Error(std::string(#Name) + ": " + what) \
    {}                                            \
  }

MOMENTLAB_DEFINE_ERROR(ShapeError);
MOMENTLAB_DEFINE_ERROR(NonFiniteEntry);
MOMENTLAB_DEFINE_ERROR(NonHermitianInput);
MOMENTLAB_DEFINE_ERROR(NoConvergence);
MOMENTLAB_DEFINE_ERROR(NotPSD);
MOMENTLAB_DEFINE_ERROR(SingularMatrix);
MOMENTLAB_DEFINE_ERROR(NonCentralLevel);
MOMENTLAB_DEFINE_ERROR(SingularBasePoint);
MOMENTLAB_DEFINE_ERROR(NotEigenPair);
MOMENTLAB_DEFINE_ERROR(DomainError);
MOMENTLAB_DEFINE_ERROR(RankTooLarge);
MOMENTLAB_DEFINE_ERROR(NotIsotropic);
MOMENTLAB_DEFINE_ERROR(InvariantMismatch);
MOMENTLAB_DEFINE_ERROR(DegenerateOrbit);
MOMENTLAB_DEFINE_ERROR(ParseError);

#undef MOMENTLAB_DEFINE_ERROR

}  // namespace momentlab
