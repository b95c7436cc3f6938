#include "texeval/error.hpp"

namespace texeval {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::FileNotFound: return "FileNotFound";
        case ErrorCode::DecodeError: return "DecodeError";
        case ErrorCode::EncodeError: return "EncodeError";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::TooSmall: return "TooSmall";
        case ErrorCode::NotGrayscale: return "NotGrayscale";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::MissingFile: return "MissingFile";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::JudgeUnavailable: return "JudgeUnavailable";
        case ErrorCode::MalformedVerdict: return "MalformedVerdict";
        case ErrorCode::InsufficientScores: return "InsufficientScores";
        case ErrorCode::MissingScores: return "MissingScores";
        case ErrorCode::TooFewModels: return "TooFewModels";
        case ErrorCode::UnknownStudy: return "UnknownStudy";
        case ErrorCode::UnknownTask: return "UnknownTask";
        case ErrorCode::DuplicateResponse: return "DuplicateResponse";
        case ErrorCode::InvalidOrdering: return "InvalidOrdering";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace texeval
