#pragma once

#include <stdexcept>
#include <string>

namespace confsd {

inline constexpr const char* kToolName = "confsd";
inline constexpr const char* kToolVersion = "0.1.0";

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: invalid parameters, malformed files, schema violations.
/// The CLI maps these to exit code 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

class ParseError : public ValidationError {
public:
    ParseError(const std::string& what, std::size_t line)
        : ValidationError(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace confsd
