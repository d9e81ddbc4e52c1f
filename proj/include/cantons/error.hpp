#pragma once

#include <stdexcept>
#include <string>

namespace cantons {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when not applicable.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), message_(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }
    /// The message without the line prefix.
    const std::string& message() const noexcept { return message_; }

private:
    std::string message_;
    std::size_t line_;
};

/// Input parsed but violates a data invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A required input file is missing or unreadable.
class MissingFileError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Municipality sets could not be aligned across elections.
class AlignmentError : public Error {
public:
    using Error::Error;
};

/// Structural problem with a graph (duplicate ids, disconnected, unknown node).
class GraphError : public Error {
public:
    using Error::Error;
};

/// A numeric routine was called outside its domain.
class DomainError : public Error {
public:
    using Error::Error;
};

}  // namespace cantons
