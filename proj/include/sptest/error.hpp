#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sptest {

enum class ErrorKind {
    MissingColumn,
    ParseError,
    UnbalancedPanel,
    DuplicateCell,
    MissingValue,
    InvalidPanel,
    KnotOutOfRange,
    DegreeTooSmall,
    NestednessViolation,
    EmptyTestSet,
    RankDeficientW,
    InsufficientRows,
    SingularOmega,
    DomainError,
    BootstrapFailure,
    ReplicationFailure,
    InvalidConfig,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-readable kind so the
/// CLI can emit structured error reports.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace sptest
