#pragma once

#include <stdexcept>
#include <string>

namespace teamtrack {

enum class ErrorKind {
    EmptyMask,
    OutOfBounds,
    NoMask,
    DimensionMismatch,
    NonContiguous,
    EmptySequence,
    Io,
    InvalidArgument,
    MissingTimings,
    SchemaMismatch,
};

// Single exception type; kind() lets callers branch without one class per failure.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace teamtrack
