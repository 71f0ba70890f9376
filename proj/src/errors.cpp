#include "errors.hpp"

namespace shapegeo {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonManifoldEdge: return "NonManifoldEdge";
    case ErrorCode::InconsistentOrientation: return "InconsistentOrientation";
    case ErrorCode::DegenerateFace: return "DegenerateFace";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnsupportedElement: return "UnsupportedElement";
    case ErrorCode::LevelTooLarge: return "LevelTooLarge";
    case ErrorCode::DegenerateAngle: return "DegenerateAngle";
    case ErrorCode::ZeroVectorArea: return "ZeroVectorArea";
    case ErrorCode::ZeroLengthEdge: return "ZeroLengthEdge";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NoAnalyticForm: return "NoAnalyticForm";
    case ErrorCode::FitFailure: return "FitFailure";
    case ErrorCode::UnsupportedWeight: return "UnsupportedWeight";
    case ErrorCode::NoPositiveOptimum: return "NoPositiveOptimum";
    case ErrorCode::BlowupDetected: return "BlowupDetected";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::SharedCombinatoricsMismatch: return "SharedCombinatoricsMismatch";
    case ErrorCode::DegenerateFrame: return "DegenerateFrame";
    case ErrorCode::DegenerateFrameEncountered: return "DegenerateFrameEncountered";
    case ErrorCode::InapplicableBound: return "InapplicableBound";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace shapegeo
