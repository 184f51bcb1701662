#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cfgames {

/// Base of all library errors.
class GameError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A malformed instance: undeclared symbols, missing rules, bad indices.
class ValidationError : public GameError {
public:
    using GameError::GameError;
};

/// Syntax error in the instance text, carrying the 1-based line number.
class ParseError : public GameError {
public:
    ParseError(std::size_t line, const std::string& what)
        : GameError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// An operation was called outside its precondition (wrong owner, lost position, ...).
class PreconditionError : public GameError {
public:
    using GameError::GameError;
};

/// Something that the theory guarantees did not happen. Always a bug.
class InvariantError : public GameError {
public:
    using GameError::GameError;
};

/// Cooperative deadline expired inside a solver loop.
class TimeoutError : public GameError {
public:
    using GameError::GameError;
};

} // namespace cfgames
