#ifndef DELIB_ERROR_HPP_
#define DELIB_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace delib {

enum class ErrorCode {
  // ingest
  MissingColumn,
  EmptyFile,
  MalformedRow,
  InvalidEncoding,
  MalformedDocument,
  EmptyThread,
  // providers
  RemoteUnavailable,
  RemoteProtocol,
  DegenerateText,
  PreconditionViolation,
  InvalidConfig,
  // numerics
  DimensionMismatch,
  EmptyCluster,
  TooFewArguments,
  DegenerateSeries,
  EmptySample,
  SampleTooSmall,
  DegenerateVariance,
  DegenerateX,
  // compare
  GroupTooSmall,
  MissingRoleMetadata,
  NoDyads,
  InvariantViolation,
  // service
  EventNotFound,
  AnalysisInProgress,
  StoreFailure,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::InvalidEncoding: return "InvalidEncoding";
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::EmptyThread: return "EmptyThread";
    case ErrorCode::RemoteUnavailable: return "RemoteUnavailable";
    case ErrorCode::RemoteProtocol: return "RemoteProtocol";
    case ErrorCode::DegenerateText: return "DegenerateText";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyCluster: return "EmptyCluster";
    case ErrorCode::TooFewArguments: return "TooFewArguments";
    case ErrorCode::DegenerateSeries: return "DegenerateSeries";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::SampleTooSmall: return "SampleTooSmall";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::DegenerateX: return "DegenerateX";
    case ErrorCode::GroupTooSmall: return "GroupTooSmall";
    case ErrorCode::MissingRoleMetadata: return "MissingRoleMetadata";
    case ErrorCode::NoDyads: return "NoDyads";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::EventNotFound: return "EventNotFound";
    case ErrorCode::AnalysisInProgress: return "AnalysisInProgress";
    case ErrorCode::StoreFailure: return "StoreFailure";
  }
  return "Unknown";
}

/// Every failure raised by the library. The code identifies the contract
/// case; the message carries human-readable detail (column name, row
/// number, endpoint, ...). `stage` is filled in by the pipeline when an
/// error crosses a stage boundary.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  Error(ErrorCode code, const std::string &detail, std::string stage)
      : std::runtime_error("[" + stage + "] " + std::string(to_string(code)) +
                           ": " + detail),
        code_(code),
        detail_(detail),
        stage_(std::move(stage)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string &detail() const noexcept { return detail_; }
  const std::string &stage() const noexcept { return stage_; }

  Error with_stage(std::string stage) const {
    return Error(code_, detail_, std::move(stage));
  }

 private:
  ErrorCode code_;
  std::string detail_;
  std::string stage_;
};

}  // namespace delib

#endif  // DELIB_ERROR_HPP_
