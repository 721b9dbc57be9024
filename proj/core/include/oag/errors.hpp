#pragma once

#include <stdexcept>
#include <string>

namespace oag {

/// Base class for every error raised by the toolkit. `kind()` is a stable
/// machine-readable tag used by the CLI error objects.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int column)
        : Error("parse", msg + " at " + std::to_string(line) + ":" + std::to_string(column)),
          line_(line), column_(column) {}
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

class ArityError : public Error {
public:
    explicit ArityError(const std::string& msg) : Error("arity", msg) {}
};

/// Violated precondition of a domain operation (zero input, bad level, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error("domain", msg) {}
};

/// Node budget exhausted or integer overflow during symbolic computation.
class ResourceError : public Error {
public:
    explicit ResourceError(const std::string& msg) : Error("resource", msg) {}
};

}  // namespace oag
