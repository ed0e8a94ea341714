#pragma once

#include <stdexcept>
#include <string>

namespace spdcwalk {

// Argument is not a finite number, or otherwise unusable.
class InvalidInputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Propagation distance or index outside the admissible range.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Two operands live on incompatible guide windows.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Measure requested on a state or matrix for which it is undefined (e.g. all zero).
class UndefinedMeasureError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Adaptive integration ran out of panel budget before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double achieved_tolerance)
        : std::runtime_error(what), achieved_(achieved_tolerance) {}

    double achieved_tolerance() const noexcept { return achieved_; }

private:
    double achieved_;
};

}  // namespace spdcwalk
