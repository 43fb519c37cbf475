#pragma once
#include <stdexcept>
#include <string>

namespace lvorb {

// Exit status reported by the command line tool for each error family.
enum class ExitCode : int {
  Ok = 0,
  Validation = 2,
  Anomaly = 3,
  Obstruction = 4,
  Internal = 5,
};

class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what, ExitCode code)
      : std::runtime_error(what), name_(std::move(name)), code_(code) {}
  const std::string& name() const { return name_; }
  ExitCode code() const { return code_; }

 private:
  std::string name_;
  ExitCode code_;
};

#define LVORB_ERROR(Name, Code)                                        \
  struct Name : Error {                                                \
    explicit Name(const std::string& w) : Error(#Name, w, Code) {}     \
  };

LVORB_ERROR(ValidationError, ExitCode::Validation)
LVORB_ERROR(ParseError, ExitCode::Validation)
LVORB_ERROR(NotAnAutomorphism, ExitCode::Validation)
LVORB_ERROR(NotPositiveDefinite, ExitCode::Validation)
LVORB_ERROR(NotCommuting, ExitCode::Validation)
LVORB_ERROR(NotCoinvariant, ExitCode::Validation)
LVORB_ERROR(OddLattice, ExitCode::Validation)
LVORB_ERROR(DivisionByZero, ExitCode::Validation)
LVORB_ERROR(NotARootOfUnity, ExitCode::Internal)
LVORB_ERROR(ConductorOverflow, ExitCode::Validation)
LVORB_ERROR(InsufficientTruncation, ExitCode::Validation)
LVORB_ERROR(OrderDoubled, ExitCode::Validation)
LVORB_ERROR(NonStandardLift, ExitCode::Validation)
LVORB_ERROR(ObstructionNonzero, ExitCode::Obstruction)
LVORB_ERROR(AnomalousOrbifold, ExitCode::Anomaly)
LVORB_ERROR(ProjectiveObstruction, ExitCode::Anomaly)
LVORB_ERROR(DegenerateForm, ExitCode::Internal)
LVORB_ERROR(NonSquareQuotient, ExitCode::Internal)
LVORB_ERROR(SolutionSpaceNotOneDim, ExitCode::Internal)
LVORB_ERROR(InternalInconsistency, ExitCode::Internal)
LVORB_ERROR(Unsupported, ExitCode::Validation)
LVORB_ERROR(IoError, ExitCode::Validation)
LVORB_ERROR(CorruptCache, ExitCode::Validation)

#undef LVORB_ERROR

}  // namespace lvorb
