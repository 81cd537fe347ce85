#pragma once

#include <stdexcept>
#include <string>

namespace exemplar {

// Process exit codes used by the CLI.
enum class ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kIo = 2,
  kSchema = 3,
  kDataConsistency = 4,
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, ExitCode code)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

#define EXEMPLAR_DEFINE_ERROR(Name, Code)                                    \
  class Name : public Error {                                                \
   public:                                                                   \
    explicit Name(const std::string& what) : Error(#Name ": " + what, Code) {} \
  };

EXEMPLAR_DEFINE_ERROR(IoError, ExitCode::kIo)
EXEMPLAR_DEFINE_ERROR(SchemaError, ExitCode::kSchema)
EXEMPLAR_DEFINE_ERROR(FormatError, ExitCode::kSchema)
EXEMPLAR_DEFINE_ERROR(MalformedSpan, ExitCode::kDataConsistency)
EXEMPLAR_DEFINE_ERROR(DuplicateId, ExitCode::kDataConsistency)
EXEMPLAR_DEFINE_ERROR(EmptyContext, ExitCode::kDataConsistency)
EXEMPLAR_DEFINE_ERROR(EmptyPool, ExitCode::kDataConsistency)
EXEMPLAR_DEFINE_ERROR(DimMismatch, ExitCode::kDataConsistency)
EXEMPLAR_DEFINE_ERROR(GoldMissing, ExitCode::kDataConsistency)
EXEMPLAR_DEFINE_ERROR(EmptyResults, ExitCode::kDataConsistency)
EXEMPLAR_DEFINE_ERROR(MixedPool, ExitCode::kDataConsistency)
EXEMPLAR_DEFINE_ERROR(NoLabels, ExitCode::kDataConsistency)

#undef EXEMPLAR_DEFINE_ERROR

}  // namespace exemplar
