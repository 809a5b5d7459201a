#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ffspectra {

enum class ErrorCode {
  NotPrime,
  ReducibleModulus,
  DegreeMismatch,
  FieldTooLarge,
  DivisionByZero,
  ContextMismatch,
  NotADivisor,
  EvenCharacteristic,
  OddCharacteristic,
  ZeroLeadingCoefficient,
  ZeroLinearCoefficient,
  ZeroConstant,
  DegenerateA,
  ZeroDirection,
  NotAMonomial,
  NotAPermutation,
  InvalidFunction,
  DegenerateField,
  EvenDegree,
  BadCongruence,
  WrongCharacteristic,
  MalformedCubic,
  GcdViolation,
  WrongCodimension,
  PredicateViolation,
  ParseError,
  BudgetExceeded,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotPrime: return "NotPrime";
    case ErrorCode::ReducibleModulus: return "ReducibleModulus";
    case ErrorCode::DegreeMismatch: return "DegreeMismatch";
    case ErrorCode::FieldTooLarge: return "FieldTooLarge";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::ContextMismatch: return "ContextMismatch";
    case ErrorCode::NotADivisor: return "NotADivisor";
    case ErrorCode::EvenCharacteristic: return "EvenCharacteristic";
    case ErrorCode::OddCharacteristic: return "OddCharacteristic";
    case ErrorCode::ZeroLeadingCoefficient: return "ZeroLeadingCoefficient";
    case ErrorCode::ZeroLinearCoefficient: return "ZeroLinearCoefficient";
    case ErrorCode::ZeroConstant: return "ZeroConstant";
    case ErrorCode::DegenerateA: return "DegenerateA";
    case ErrorCode::ZeroDirection: return "ZeroDirection";
    case ErrorCode::NotAMonomial: return "NotAMonomial";
    case ErrorCode::NotAPermutation: return "NotAPermutation";
    case ErrorCode::InvalidFunction: return "InvalidFunction";
    case ErrorCode::DegenerateField: return "DegenerateField";
    case ErrorCode::EvenDegree: return "EvenDegree";
    case ErrorCode::BadCongruence: return "BadCongruence";
    case ErrorCode::WrongCharacteristic: return "WrongCharacteristic";
    case ErrorCode::MalformedCubic: return "MalformedCubic";
    case ErrorCode::GcdViolation: return "GcdViolation";
    case ErrorCode::WrongCodimension: return "WrongCodimension";
    case ErrorCode::PredicateViolation: return "PredicateViolation";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ffspectra
