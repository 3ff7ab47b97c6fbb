// Error types shared by all kmsym components.
#ifndef KMSYM_ERRORS_HPP
#define KMSYM_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kmsym {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DivisionByZero : Error {
    DivisionByZero() : Error("division by zero") {}
    explicit DivisionByZero(const std::string& what) : Error(what) {}
};

struct NotAPthPower : Error {
    explicit NotAPthPower(const std::string& what) : Error(what) {}
};

struct ZeroInput : Error {
    explicit ZeroInput(const std::string& what) : Error(what) {}
};

// Parse failure; `position` is a 0-based byte offset into the input text.
struct SyntaxError : Error {
    size_t position;
    SyntaxError(const std::string& what, size_t pos)
        : Error(what + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

struct UnknownVariable : Error {
    size_t position;
    UnknownVariable(const std::string& name, size_t pos)
        : Error("unknown variable '" + name + "' (at position " + std::to_string(pos) + ")"),
          position(pos) {}
};

struct ModeMismatch : Error {
    explicit ModeMismatch(const std::string& what) : Error(what) {}
};

struct SpecMismatch : Error {
    explicit SpecMismatch(const std::string& what) : Error(what) {}
};

// A rewrite move whose side condition does not hold; carries the violated equation.
struct SideConditionFailed : Error {
    explicit SideConditionFailed(const std::string& what) : Error(what) {}
};

struct PreconditionFailed : Error {
    explicit PreconditionFailed(const std::string& what) : Error(what) {}
};

struct NonPositiveFactor : Error {
    explicit NonPositiveFactor(const std::string& what) : Error(what) {}
};

// Structural schema violation; `path` is a JSON pointer to the offending node.
struct SchemaError : Error {
    std::string path;
    SchemaError(const std::string& what, std::string path_)
        : Error(what + " (at " + path_ + ")"), path(std::move(path_)) {}
};

struct InternalError : Error {
    explicit InternalError(const std::string& what) : Error("internal error: " + what) {}
};

}  // namespace kmsym

#endif
