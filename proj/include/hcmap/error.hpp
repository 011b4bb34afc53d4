#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hcmap {

enum class Errc {
  SeriesTooShort,
  DegenerateSeries,
  DuplicateIds,
  ShapeMismatch,
  ThetaOutOfRange,
  InvalidArgument,
  TooFewElements,
  DepthOutOfRange,
  ElementSetMismatch,
  TauOutOfRange,
  UnknownEdge,
  CanvasTooSmall,
  RaggedRows,
  NonNumericValue,
  NotSquare,
  AsymmetryBeyondTolerance,
  NonzeroDiagonal,
  NegativeDistance,
  SchemaVersionMismatch,
  MalformedDocument,
  IoError,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::SeriesTooShort: return "SeriesTooShort";
    case Errc::DegenerateSeries: return "DegenerateSeries";
    case Errc::DuplicateIds: return "DuplicateIds";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::ThetaOutOfRange: return "ThetaOutOfRange";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::TooFewElements: return "TooFewElements";
    case Errc::DepthOutOfRange: return "DepthOutOfRange";
    case Errc::ElementSetMismatch: return "ElementSetMismatch";
    case Errc::TauOutOfRange: return "TauOutOfRange";
    case Errc::UnknownEdge: return "UnknownEdge";
    case Errc::CanvasTooSmall: return "CanvasTooSmall";
    case Errc::RaggedRows: return "RaggedRows";
    case Errc::NonNumericValue: return "NonNumericValue";
    case Errc::NotSquare: return "NotSquare";
    case Errc::AsymmetryBeyondTolerance: return "AsymmetryBeyondTolerance";
    case Errc::NonzeroDiagonal: return "NonzeroDiagonal";
    case Errc::NegativeDistance: return "NegativeDistance";
    case Errc::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case Errc::MalformedDocument: return "MalformedDocument";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library. `code()` identifies the failure
/// class; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace hcmap
