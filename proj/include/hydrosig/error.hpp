#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hydrosig {

/// Failure categories shared by every module. Feature code maps any of
/// these onto a masked (missing) entry; ingestion and the CLI surface them.
enum class ErrorKind {
    ZeroVariance,
    LagTooLarge,
    DegeneratePacf,
    TooShort,
    NonconvergentLoess,
    SegmentTooLong,
    Undefined,
    DegenerateFit,
    FitFailure,
    OptimizerFailure,
    SingularDesign,
    InvalidSeries,
    AllMissingColumn,
    AllConstantColumns,
    ZeroVarianceColumn,
    RankDeficient,
    MalformedDissimilarity,
    DegenerateLabels,
    SchemaMismatch,
    EmptyMatrix,
    MalformedLine,
    UnknownElement,
    CoordinateOutOfRange,
    DuplicateStation,
    BadHeader,
    BadDate,
    DuplicateObservation,
    EmptyRecord,
    Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    /// Located error; line numbers start at 1.
    Error(ErrorKind kind, std::size_t line, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": line " + std::to_string(line) + ": " + what),
          kind_(kind),
          line_(line) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    ErrorKind kind_;
    std::size_t line_ = 0;
};

}  // namespace hydrosig
