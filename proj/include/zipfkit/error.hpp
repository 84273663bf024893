#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zipfkit {

enum class Errc {
  EmptyCorpus,
  InvalidToken,
  InvalidSpec,
  EmptyRequest,
  CapacityExceeded,
  InvalidTarget,
  InvalidAllocation,
  InvalidPrefix,
  SequenceTooShort,
  InvalidBase,
  InvalidRecord,
  NoTokens,
  InsufficientData,
  EmptyTable,
  UnstableResample,
  EmptyFile,
  IoError,
  EncodingError,
  ConfigMismatch,
};

// Coarse grouping used for process exit codes.
enum class ErrorFamily { Io, Validation, Statistics };

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::InvalidToken: return "InvalidToken";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::EmptyRequest: return "EmptyRequest";
    case Errc::CapacityExceeded: return "CapacityExceeded";
    case Errc::InvalidTarget: return "InvalidTarget";
    case Errc::InvalidAllocation: return "InvalidAllocation";
    case Errc::InvalidPrefix: return "InvalidPrefix";
    case Errc::SequenceTooShort: return "SequenceTooShort";
    case Errc::InvalidBase: return "InvalidBase";
    case Errc::InvalidRecord: return "InvalidRecord";
    case Errc::NoTokens: return "NoTokens";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::EmptyTable: return "EmptyTable";
    case Errc::UnstableResample: return "UnstableResample";
    case Errc::EmptyFile: return "EmptyFile";
    case Errc::IoError: return "IoError";
    case Errc::EncodingError: return "EncodingError";
    case Errc::ConfigMismatch: return "ConfigMismatch";
  }
  return "Unknown";
}

constexpr ErrorFamily family_of(Errc code) noexcept {
  switch (code) {
    case Errc::EmptyFile:
    case Errc::IoError:
    case Errc::EncodingError:
      return ErrorFamily::Io;
    case Errc::InsufficientData:
    case Errc::EmptyTable:
    case Errc::UnstableResample:
      return ErrorFamily::Statistics;
    default:
      return ErrorFamily::Validation;
  }
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }
  ErrorFamily family() const noexcept { return family_of(code_); }

 private:
  Errc code_;
};

}  // namespace zipfkit
