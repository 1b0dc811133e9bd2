#pragma once

#include <stdexcept>
#include <string>

namespace qhl {

// Error taxonomy shared across the library. Everything derives from
// std::runtime_error / std::invalid_argument so callers can catch broadly.

struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct RangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct SingularityError : std::domain_error {
    using std::domain_error::domain_error;
};

struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A marching scheme cannot resolve the kernel mass at the current step size.
struct StepSizeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StateError : std::logic_error {
    using std::logic_error::logic_error;
};

// Simulated intensity ran away past the configured event budget.
struct ExplosionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EstimationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Configuration schema violation; carries the JSON path of the bad field.
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_path(field) {}
    std::string field_path;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qhl
