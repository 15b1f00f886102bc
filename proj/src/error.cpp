#include "learnorder/error.hpp"

namespace learnorder {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::DuplicateRecord: return "DuplicateRecord";
    case ErrorCode::RaggedLogs: return "RaggedLogs";
    case ErrorCode::MissingTriple: return "MissingTriple";
    case ErrorCode::TooFewRuns: return "TooFewRuns";
    case ErrorCode::EmptyDifficulty: return "EmptyDifficulty";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MalformedCSV: return "MalformedCSV";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::MissingCategory: return "MissingCategory";
    case ErrorCode::MetricCoverageGap: return "MetricCoverageGap";
    case ErrorCode::EmptyMetric: return "EmptyMetric";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::ImageDecodeError: return "ImageDecodeError";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::ConstantSeries: return "ConstantSeries";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

bool is_io_error(ErrorCode code) noexcept {
    return code == ErrorCode::Io || code == ErrorCode::ImageDecodeError;
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

} // namespace learnorder
