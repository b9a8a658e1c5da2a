#pragma once

#include <stdexcept>
#include <string>

namespace fplm {

/// Input mesh does not satisfy the preconditions of an operation.
class MeshError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration (bad gamma, empty fixed set, unsupported dimension).
class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// File could not be read or written.
class IoError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text; carries the 1-based line number where parsing stopped.
class ParseError : public std::runtime_error
{
public:
    ParseError(const std::string& source, long line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what)
        , line_(line)
    {}

    long line() const noexcept { return line_; }

private:
    long line_;
};

} // namespace fplm
