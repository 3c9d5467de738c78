#include "cusp/error.hpp"

namespace cusp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSquarefree: return "NotSquarefree";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::CtxMismatch: return "CtxMismatch";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::InternalOverflow: return "InternalOverflow";
    case ErrorCode::NoUnitFound: return "NoUnitFound";
    case ErrorCode::NonPositiveImaginary: return "NonPositiveImaginary";
    case ErrorCode::ZeroTranslation: return "ZeroTranslation";
    case ErrorCode::InvalidLevel: return "InvalidLevel";
    case ErrorCode::UnboundedRegion: return "UnboundedRegion";
    case ErrorCode::NonTermination: return "NonTermination";
    case ErrorCode::LevelOutOfRange: return "LevelOutOfRange";
    case ErrorCode::InternalError: return "InternalError";
    case ErrorCode::VerificationFailed: return "VerificationFailed";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace cusp
