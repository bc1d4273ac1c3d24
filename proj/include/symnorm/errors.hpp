#pragma once

#include <stdexcept>
#include <string>

namespace symnorm {

// Thrown when an exact computation would exceed its enumeration guard.
// The message names the guard and suggests the Monte Carlo path where one exists.
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown by iterative solvers that fail to reach the requested tolerance.
// The message reports the tolerance actually achieved.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_deviation(achieved) {}
    double achieved_deviation;
};

// Thrown when a computed quantity violates a structural postcondition
// (e.g. a certified bracket that the midpoint escapes).
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace symnorm
