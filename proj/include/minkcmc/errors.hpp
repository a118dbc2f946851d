#pragma once

#include <stdexcept>
#include <string>

namespace minkcmc {

enum class ErrorCode {
  NonUnimodular,
  BandOverflow,
  NotTwisted,
  SmallCellSuspected,
  IllConditioned,
  ResidualTooLarge,
  NotPlusLoop,
  SchemaError,
  ParityViolation,
  TraceViolation,
  VanishingA,
  DetDrift,
  NotRealForm,
  NotNormalized,
  SecondSmallCell,
  MissingAux,
  LeftMaximalInterval,
  ModulusRange,
  TotallyUmbilic,
  InfeasibleP,
  NotInR,
  InsufficientNeighborhood,
  DegenerateMetric,
  NotSmyth,
  DomainNotSymmetric,
  IOError,
};

inline const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonUnimodular: return "NonUnimodular";
    case ErrorCode::BandOverflow: return "BandOverflow";
    case ErrorCode::NotTwisted: return "NotTwisted";
    case ErrorCode::SmallCellSuspected: return "SmallCellSuspected";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::NotPlusLoop: return "NotPlusLoop";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ParityViolation: return "ParityViolation";
    case ErrorCode::TraceViolation: return "TraceViolation";
    case ErrorCode::VanishingA: return "VanishingA";
    case ErrorCode::DetDrift: return "DetDrift";
    case ErrorCode::NotRealForm: return "NotRealForm";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::SecondSmallCell: return "SecondSmallCell";
    case ErrorCode::MissingAux: return "MissingAux";
    case ErrorCode::LeftMaximalInterval: return "LeftMaximalInterval";
    case ErrorCode::ModulusRange: return "ModulusRange";
    case ErrorCode::TotallyUmbilic: return "TotallyUmbilic";
    case ErrorCode::InfeasibleP: return "InfeasibleP";
    case ErrorCode::NotInR: return "NotInR";
    case ErrorCode::InsufficientNeighborhood: return "InsufficientNeighborhood";
    case ErrorCode::DegenerateMetric: return "DegenerateMetric";
    case ErrorCode::NotSmyth: return "NotSmyth";
    case ErrorCode::DomainNotSymmetric: return "DomainNotSymmetric";
    case ErrorCode::IOError: return "IOError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace minkcmc
