#include "rarepred/error.hpp"

namespace rarepred {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::EmptyPanel: return "EmptyPanel";
    case Errc::EmptySubset: return "EmptySubset";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::InputError: return "InputError";
    case Errc::ConfigParse: return "ConfigParse";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::SingularInformation: return "SingularInformation";
    case Errc::AllOneClass: return "AllOneClass";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::EmptyClass: return "EmptyClass";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::RatioWouldShrinkMinority: return "RatioWouldShrinkMinority";
    case Errc::TooFewMinority: return "TooFewMinority";
    case Errc::KTooLarge: return "KTooLarge";
    case Errc::AllReplicatesFailed: return "AllReplicatesFailed";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::OneClassOnly: return "OneClassOnly";
    case Errc::NoSeedHistory: return "NoSeedHistory";
    case Errc::EmptySide: return "EmptySide";
    case Errc::CalibrationFailed: return "CalibrationFailed";
  }
  return "Unknown";
}

ErrorCategory category(Errc code) noexcept {
  switch (code) {
    case Errc::MissingColumn:
    case Errc::MalformedRow:
    case Errc::EmptyPanel:
    case Errc::EmptySubset:
    case Errc::SchemaMismatch:
    case Errc::InputError:
      return ErrorCategory::Data;
    case Errc::ConfigParse:
      return ErrorCategory::Config;
    default:
      return ErrorCategory::Computation;
  }
}

}  // namespace rarepred
