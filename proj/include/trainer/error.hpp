#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace trainer {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised while reading a scenario document.
class ScenarioError : public Error {
public:
    enum class Kind { Syntax, Schema, Reference, Cycle, MissingInverse };

    ScenarioError(Kind kind, std::string message, std::vector<std::string> ids = {})
        : Error(std::move(message)), kind_(kind), ids_(std::move(ids)) {}

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    /// Offending identifiers (dangling reference, cycle members).
    [[nodiscard]] const std::vector<std::string>& ids() const noexcept { return ids_; }

private:
    Kind kind_;
    std::vector<std::string> ids_;
};

const char* to_string(ScenarioError::Kind kind) noexcept;

class BusClosedError : public Error {
public:
    BusClosedError() : Error("event bus is closed") {}
};

class SessionError : public Error {
public:
    enum class Kind { InvalidScenario, UnknownStep, SessionFinished, SessionNotFinished, LogCorruption };

    SessionError(Kind kind, std::string message) : Error(std::move(message)), kind_(kind) {}
    [[nodiscard]] Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Range and domain violations in analytics and perf arithmetic.
class DomainError : public Error {
public:
    using Error::Error;
};

class StoreError : public Error {
public:
    enum class Kind { Parse, ReplayMismatch, DuplicateId, Storage, UnknownScenario };

    StoreError(Kind kind, std::string message) : Error(std::move(message)), kind_(kind) {}
    [[nodiscard]] Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace trainer
