#pragma once

#include <stdexcept>
#include <string>

namespace lyo {

// Physically meaningless input to a correlation (outside its domain).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Invalid scenario or configuration document.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A simulation stage could not complete (solver failure, horizon exceeded, ...).
class SimulationError : public std::runtime_error {
public:
    SimulationError(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace lyo
