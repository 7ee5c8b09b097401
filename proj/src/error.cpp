#include "sptest/error.hpp"

namespace sptest {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::MissingColumn: return "MissingColumn";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::UnbalancedPanel: return "UnbalancedPanel";
        case ErrorKind::DuplicateCell: return "DuplicateCell";
        case ErrorKind::MissingValue: return "MissingValue";
        case ErrorKind::InvalidPanel: return "InvalidPanel";
        case ErrorKind::KnotOutOfRange: return "KnotOutOfRange";
        case ErrorKind::DegreeTooSmall: return "DegreeTooSmall";
        case ErrorKind::NestednessViolation: return "NestednessViolation";
        case ErrorKind::EmptyTestSet: return "EmptyTestSet";
        case ErrorKind::RankDeficientW: return "RankDeficientW";
        case ErrorKind::InsufficientRows: return "InsufficientRows";
        case ErrorKind::SingularOmega: return "SingularOmega";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::BootstrapFailure: return "BootstrapFailure";
        case ErrorKind::ReplicationFailure: return "ReplicationFailure";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

}  // namespace sptest
