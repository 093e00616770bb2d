#include "poroflow/errors.hpp"

#include <utility>

namespace poroflow {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::DomainViolation: return "DomainViolation";
        case ErrorKind::Degenerate: return "Degenerate";
        case ErrorKind::Overflow: return "Overflow";
        case ErrorKind::BadDimensions: return "BadDimensions";
        case ErrorKind::UnknownLabel: return "UnknownLabel";
        case ErrorKind::OutOfDomain: return "OutOfDomain";
        case ErrorKind::SingularMobility: return "SingularMobility";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::IncompatibleNeumann: return "IncompatibleNeumann";
        case ErrorKind::NonExistence: return "NonExistence";
        case ErrorKind::NotApplicable: return "NotApplicable";
        case ErrorKind::PartitionMismatch: return "PartitionMismatch";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

NonExistenceError::NonExistenceError(const std::string& message, std::vector<std::size_t> nodes)
    : Error(ErrorKind::NonExistence, message), nodes_(std::move(nodes)) {}

}  // namespace poroflow
