#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace learnorder {

enum class ErrorCode {
    // run ledger
    MalformedRecord,
    DuplicateRecord,
    RaggedLogs,
    MissingTriple,
    TooFewRuns,
    EmptyDifficulty,
    InvalidArgument,
    // catalog / metric tables
    MalformedCSV,
    NonNumericCell,
    MissingCategory,
    MetricCoverageGap,
    EmptyMetric,
    // images
    UnsupportedFormat,
    ImageDecodeError,
    WindowTooLarge,
    ImageTooSmall,
    // statistics
    ConstantSeries,
    LengthMismatch,
    TooFewPoints,
    // filesystem
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// I/O failures map to CLI exit code 2, everything else to 3.
bool is_io_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }
    // The message without the code prefix, for re-wrapping with more context.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

} // namespace learnorder
