#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace whirlbench {

enum class ErrorKind { Validation, Numeric, Io, Parse };

/// Base of every error raised by the library. The kind maps onto the CLI
/// exit-code taxonomy (validation 1, numeric 2, I/O 3).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

/// A frequency grid point coincides with an undamped pole.
class PoleError : public NumericError {
public:
    PoleError(std::size_t index, const std::string& what) : NumericError(what), index_(index) {}
    std::size_t grid_index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

/// Malformed input text. line() is 1-based; 0 when no line applies.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace whirlbench
