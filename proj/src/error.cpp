#include "dissolv/error.hpp"

namespace dissolv {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnbalancedParen: return "UnbalancedParen";
    case ErrorCode::UnterminatedString: return "UnterminatedString";
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::NotAList: return "NotAList";
    case ErrorCode::MissingBoardOutline: return "MissingBoardOutline";
    case ErrorCode::UnknownLayerName: return "UnknownLayerName";
    case ErrorCode::MalformedForm: return "MalformedForm";
    case ErrorCode::UnsupportedFeature: return "UnsupportedFeature";
    case ErrorCode::OpenOutline: return "OpenOutline";
    case ErrorCode::MultipleLoops: return "MultipleLoops";
    case ErrorCode::CollinearPoints: return "CollinearPoints";
    case ErrorCode::ParamBelowMinimum: return "ParamBelowMinimum";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InvalidSolid: return "InvalidSolid";
    case ErrorCode::UnboundedSolid: return "UnboundedSolid";
    case ErrorCode::PitchTooCoarse: return "PitchTooCoarse";
    case ErrorCode::NotWatertight: return "NotWatertight";
    case ErrorCode::LayerOutOfRange: return "LayerOutOfRange";
    case ErrorCode::DiameterBelowMinimum: return "DiameterBelowMinimum";
    case ErrorCode::PadOutsideBoard: return "PadOutsideBoard";
    case ErrorCode::UnknownPackage: return "UnknownPackage";
    case ErrorCode::PinCountMismatch: return "PinCountMismatch";
    case ErrorCode::DrcNotClean: return "DrcNotClean";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::UnknownNet: return "UnknownNet";
    case ErrorCode::NegativeQuantity: return "NegativeQuantity";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {
std::string decorate(ErrorCode code, const std::string& message, std::optional<int> line) {
  std::string out(to_string(code));
  if (line) out += " (line " + std::to_string(*line) + ")";
  if (!message.empty()) out += ": " + message;
  return out;
}
}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<int> line)
    : std::runtime_error(decorate(code, message, line)), code_(code), line_(line) {}

}  // namespace dissolv
