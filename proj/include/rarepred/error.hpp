#pragma once

#include <stdexcept>
#include <string>

namespace rarepred {

enum class Errc {
  // input data
  MissingColumn,
  MalformedRow,
  EmptyPanel,
  EmptySubset,
  SchemaMismatch,
  InputError,
  // configuration
  ConfigParse,
  // computation
  DimensionMismatch,
  SingularInformation,
  AllOneClass,
  NoConvergence,
  EmptyClass,
  OutOfRange,
  RatioWouldShrinkMinority,
  TooFewMinority,
  KTooLarge,
  AllReplicatesFailed,
  EmptyInput,
  OneClassOnly,
  NoSeedHistory,
  EmptySide,
  CalibrationFailed,
};

enum class ErrorCategory { Data, Config, Computation };

const char* to_string(Errc code) noexcept;
ErrorCategory category(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Raised by the config and sampler-spec parsers; `position` is a byte offset.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& reason)
      : Error(Errc::ConfigParse, "at byte " + std::to_string(position) + ": " + reason),
        position_(position),
        reason_(reason) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t position_;
  std::string reason_;
};

// Input row that failed validation; `line` is 1-based and counts the header.
class MalformedRowError : public Error {
 public:
  MalformedRowError(std::size_t line, const std::string& reason)
      : Error(Errc::MalformedRow, "line " + std::to_string(line) + ": " + reason),
        line_(line),
        reason_(reason) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

}  // namespace rarepred
