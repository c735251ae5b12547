#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace evosal {

// Caller broke a documented precondition (shape mismatch, empty input, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised by the chromosome reader; carries the 1-based line and offending token.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::string token, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ", token '" + token + "': " + what),
          line_(line), token_(std::move(token)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& token() const noexcept { return token_; }

private:
    std::size_t line_;
    std::string token_;
};

} // namespace evosal
