#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dissolv {

enum class ErrorCode {
  // sexpr
  UnbalancedParen,
  UnterminatedString,
  EmptyDocument,
  NotAList,
  // pcb_model
  MissingBoardOutline,
  UnknownLayerName,
  MalformedForm,
  UnsupportedFeature,
  OpenOutline,
  MultipleLoops,
  CollinearPoints,
  // process
  ParamBelowMinimum,
  ConfigError,
  // geom / meshing
  InvalidSolid,
  UnboundedSolid,
  PitchTooCoarse,
  NotWatertight,
  // synth
  LayerOutOfRange,
  DiameterBelowMinimum,
  PadOutsideBoard,
  UnknownPackage,
  PinCountMismatch,
  DrcNotClean,
  // analysis
  Disconnected,
  SingularSystem,
  UnknownNet,
  NegativeQuantity,
  // io
  FileNotFound,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Structured failure carrying a machine-readable code and, for parse
/// errors, the 1-based source line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::optional<int> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<int> line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::optional<int> line_;
};

}  // namespace dissolv
