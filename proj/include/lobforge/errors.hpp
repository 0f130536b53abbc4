#pragma once

#include <stdexcept>
#include <string>

namespace lobforge {

// Exit-code classes used by the CLI. Library code throws typed errors;
// the CLI maps whatever escapes to one of these.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitIo = 2,
  kExitData = 3,
  kExitFormat = 4,
  kExitShape = 5,
  kExitNumeric = 6,
};

class Error : public std::runtime_error {
 public:
  Error(std::string msg, int exit_code)
      : std::runtime_error(std::move(msg)), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

#define LOBFORGE_DEFINE_ERROR(Name, Code)                       \
  struct Name final : Error {                                   \
    explicit Name(const std::string& msg)                       \
        : Error(std::string(#Name) + ": " + msg, Code) {}       \
  }

LOBFORGE_DEFINE_ERROR(MalformedRecord, kExitData);
LOBFORGE_DEFINE_ERROR(CrossedBook, kExitData);
LOBFORGE_DEFINE_ERROR(NegativeValue, kExitData);
LOBFORGE_DEFINE_ERROR(IoError, kExitIo);
LOBFORGE_DEFINE_ERROR(EmptySeries, kExitData);
LOBFORGE_DEFINE_ERROR(DegenerateLadder, kExitData);
LOBFORGE_DEFINE_ERROR(MissingStats, kExitData);
LOBFORGE_DEFINE_ERROR(ZeroVariance, kExitNumeric);
LOBFORGE_DEFINE_ERROR(ShapeMismatch, kExitShape);
LOBFORGE_DEFINE_ERROR(SeriesTooShort, kExitData);
LOBFORGE_DEFINE_ERROR(SpecMismatch, kExitData);
LOBFORGE_DEFINE_ERROR(AlignmentGap, kExitData);
LOBFORGE_DEFINE_ERROR(InvalidArch, kExitShape);
LOBFORGE_DEFINE_ERROR(EmptySet, kExitData);
LOBFORGE_DEFINE_ERROR(VersionMismatch, kExitFormat);
LOBFORGE_DEFINE_ERROR(CorruptChecksum, kExitFormat);
LOBFORGE_DEFINE_ERROR(OutOfRange, kExitNumeric);
LOBFORGE_DEFINE_ERROR(LengthMismatch, kExitShape);
LOBFORGE_DEFINE_ERROR(NonPositiveActual, kExitData);
LOBFORGE_DEFINE_ERROR(InsufficientOverlap, kExitData);
LOBFORGE_DEFINE_ERROR(DegenerateFit, kExitNumeric);
LOBFORGE_DEFINE_ERROR(ConfigError, kExitUsage);

#undef LOBFORGE_DEFINE_ERROR

}  // namespace lobforge
