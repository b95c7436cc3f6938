#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace texeval {

enum class ErrorCode {
    FileNotFound,
    DecodeError,
    EncodeError,
    DimensionMismatch,
    TooSmall,
    NotGrayscale,
    InvalidArgument,
    ParseError,
    MissingFile,
    ConfigError,
    JudgeUnavailable,
    MalformedVerdict,
    InsufficientScores,
    MissingScores,
    TooFewModels,
    UnknownStudy,
    UnknownTask,
    DuplicateResponse,
    InvalidOrdering,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the toolkit carries a machine-readable code so the
/// harness can mark rows and the ranking service can map it onto a status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace texeval
