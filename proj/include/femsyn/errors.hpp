#pragma once

#include <stdexcept>
#include <string>

namespace femsyn {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration or precondition violation on sizes/counts.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Degenerate input that leaves a regression or fit without full rank.
class RankError : public Error {
public:
    using Error::Error;
};

/// Result falls outside an admissible range (e.g. DAC span).
class RangeError : public Error {
public:
    using Error::Error;
};

/// Marker extraction failed: either no crossing or more than one.
class MarkerError : public Error {
public:
    enum class Kind { Absent, Ambiguous };
    MarkerError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Malformed input file; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace femsyn
