#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace poroflow {

enum class ErrorKind {
    InvalidArgument,
    DomainViolation,
    Degenerate,
    Overflow,
    BadDimensions,
    UnknownLabel,
    OutOfDomain,
    SingularMobility,
    NoConvergence,
    IncompatibleNeumann,
    NonExistence,
    NotApplicable,
    PartitionMismatch,
};

std::string_view to_string(ErrorKind kind);

/// Base exception for every failure raised by the library. The kind is the
/// stable, machine-checkable part; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised when the transformed linear solve produced values outside the
/// domain of the Hopf-Cole inversion (P >= 0), i.e. no real pressure exists.
class NonExistenceError : public Error {
public:
    NonExistenceError(const std::string& message, std::vector<std::size_t> nodes);

    [[nodiscard]] const std::vector<std::size_t>& nodes() const noexcept { return nodes_; }

private:
    std::vector<std::size_t> nodes_;
};

}  // namespace poroflow
