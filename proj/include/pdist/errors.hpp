#pragma once

#include <stdexcept>
#include <string>

namespace pdist {

// Input that violates a documented precondition (CLI exit code 2).
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Herald pattern has (numerically) zero probability (CLI exit code 3).
struct NoHeraldError : std::runtime_error {
    explicit NoHeraldError(const std::string& what) : std::runtime_error(what) {}
};

// Iterative solver failed to converge (CLI exit code 4).
struct SolverError : std::runtime_error {
    SolverError(const std::string& what, double residual)
        : std::runtime_error(what), residual(residual) {}
    double residual;
};

// Error rate too large for every admissible code/scheme (CLI exit code 5).
struct AboveThresholdError : std::runtime_error {
    explicit AboveThresholdError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pdist
