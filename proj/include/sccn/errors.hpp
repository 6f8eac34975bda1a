#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sccn {

enum class ErrorCode {
  InvalidArgument,
  PointBehindCamera,
  EmptyMesh,
  OutOfBounds,
  BackgroundPixel,
  NothingVisible,
  NoDetection,
  EmptyBox,
  InsufficientPoints,
  DegenerateConfiguration,
  NoRealSolution,
  TooFewPoints,
  ConsensusFailure,
  DivergedRefinement,
  ShapeMismatch,
  MissingReflection,
  EmptyPointSet,
  ConfigInvalid,
  MeshLoadFailure,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::PointBehindCamera: return "PointBehindCamera";
    case ErrorCode::EmptyMesh: return "EmptyMesh";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::BackgroundPixel: return "BackgroundPixel";
    case ErrorCode::NothingVisible: return "NothingVisible";
    case ErrorCode::NoDetection: return "NoDetection";
    case ErrorCode::EmptyBox: return "EmptyBox";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::NoRealSolution: return "NoRealSolution";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::ConsensusFailure: return "ConsensusFailure";
    case ErrorCode::DivergedRefinement: return "DivergedRefinement";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::MissingReflection: return "MissingReflection";
    case ErrorCode::EmptyPointSet: return "EmptyPointSet";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::MeshLoadFailure: return "MeshLoadFailure";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the harness in particular) can record it as data.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sccn
