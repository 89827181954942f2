#pragma once

#include <stdexcept>
#include <string>

namespace esctk {

// Invalid configuration or scenario field. `field` names the offending key
// when known so callers can point at it.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message),
          field_(std::move(field)) {}

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// Scenario file could not be parsed. Carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message),
          line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

// A state, estimate or control signal became non-finite. The step index is
// attached by the simulation loop once known (-1 until then).
class DivergedError : public std::runtime_error {
public:
    explicit DivergedError(const std::string& message, long step = -1)
        : std::runtime_error(step < 0 ? message
                                      : message + " at step " + std::to_string(step)),
          step_(step) {}

    long step() const { return step_; }

private:
    long step_;
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& path, const std::string& message)
        : std::runtime_error(path + ": " + message) {}
};

}  // namespace esctk
