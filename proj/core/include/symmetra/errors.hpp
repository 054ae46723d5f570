#pragma once

#include <stdexcept>
#include <string>

namespace symmetra {

// Base class for every error thrown by the library.  Each concrete error
// prefixes its message with a stable code so callers (and the CLI) can match
// failures without relying on exception types across a C boundary.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define SYMMETRA_DEFINE_ERROR(Name)                    \
  struct Name : Error {                                \
    explicit Name(const std::string& what)             \
        : Error(std::string(#Name) + ": " + what) {}   \
  };

// Numerics
SYMMETRA_DEFINE_ERROR(NotHermitian)
SYMMETRA_DEFINE_ERROR(NoConvergence)

// Groups
SYMMETRA_DEFINE_ERROR(NotUnitary)
SYMMETRA_DEFINE_ERROR(OrderExceeded)
SYMMETRA_DEFINE_ERROR(TooLarge)
SYMMETRA_DEFINE_ERROR(ProjectivePhases)

// Bundles and assemblages
SYMMETRA_DEFINE_ERROR(TooManySections)
SYMMETRA_DEFINE_ERROR(NotUniform)
SYMMETRA_DEFINE_ERROR(NotSymmetric)

// Construction
SYMMETRA_DEFINE_ERROR(NoPartition)

// Fields
SYMMETRA_DEFINE_ERROR(NotPrime)
SYMMETRA_DEFINE_ERROR(EvenCharacteristic)

// Incompatibility
SYMMETRA_DEFINE_ERROR(EtaOutOfRange)
SYMMETRA_DEFINE_ERROR(NotUniformOrRigid)
SYMMETRA_DEFINE_ERROR(InfeasibleCertificate)

// I/O
SYMMETRA_DEFINE_ERROR(SchemaMismatch)
SYMMETRA_DEFINE_ERROR(InvariantViolation)

// CLI
SYMMETRA_DEFINE_ERROR(UsageError)

#undef SYMMETRA_DEFINE_ERROR

}  // namespace symmetra
