#pragma once

#include <stdexcept>
#include <string>

namespace ergopt {

enum class ErrorKind {
  EmptyAlphabet,
  StrandedSymbol,
  InvalidWord,
  WordTooShort,
  BudgetExceeded,
  IncompleteTable,
  NoApproximantAvailable,
  MaxEffortExceeded,
  Infeasible,
  NumericallyUnstable,
  UnimodalityViolation,
  DenominatorViolated,
  HorizonTooLarge,
  NotMixing,
  TargetsIndistinguishable,
  HypothesisFails,
  InvalidArgument,
  ParseError,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyAlphabet: return "EmptyAlphabet";
    case ErrorKind::StrandedSymbol: return "StrandedSymbol";
    case ErrorKind::InvalidWord: return "InvalidWord";
    case ErrorKind::WordTooShort: return "WordTooShort";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::IncompleteTable: return "IncompleteTable";
    case ErrorKind::NoApproximantAvailable: return "NoApproximantAvailable";
    case ErrorKind::MaxEffortExceeded: return "MaxEffortExceeded";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::NumericallyUnstable: return "NumericallyUnstable";
    case ErrorKind::UnimodalityViolation: return "UnimodalityViolation";
    case ErrorKind::DenominatorViolated: return "DenominatorViolated";
    case ErrorKind::HorizonTooLarge: return "HorizonTooLarge";
    case ErrorKind::NotMixing: return "NotMixing";
    case ErrorKind::TargetsIndistinguishable: return "TargetsIndistinguishable";
    case ErrorKind::HypothesisFails: return "HypothesisFails";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Single exception type for the library; `kind()` identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ergopt
