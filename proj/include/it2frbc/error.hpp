#ifndef IT2FRBC_ERROR_HPP
#define IT2FRBC_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace it2frbc {

/// Base class for recoverable errors caused by inputs (files, data, parameters).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter or option violates the invariants of the type that owns it.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Input data is unusable: empty, wrong dimensionality, untrainable split, ...
class DataError : public Error {
public:
    using Error::Error;
};

/// Malformed text input. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public DataError {
public:
    ParseError(const std::string& what, std::size_t line)
        : DataError(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// An internal invariant was broken. Always a bug.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace it2frbc

#endif  // IT2FRBC_ERROR_HPP
