#pragma once

#include <stdexcept>
#include <string>

namespace arpsim {

// Invalid physical input: bad field/atom/scheme parameters or a formula
// evaluated outside its domain (e.g. zero one-photon detuning).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Configuration problems: unknown keys, malformed values, unit mismatches.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Integrator failure or an invariant violated beyond tolerance.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double time)
        : std::runtime_error(what), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace arpsim
