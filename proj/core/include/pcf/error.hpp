#pragma once

#include <stdexcept>
#include <string>

namespace pcf {

enum class ErrorKind {
    invalid_argument,
    empty_input,
    resolution,
    aliasing,
    dimension_mismatch,
    grid_mismatch,
    factorization_domain,
    convergence,
    singular_factor,
    infeasible_candidate,
    infeasible_class,
    numerical_inconsistency,
    horizon,
    io,
    parse,
    verification,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Thrown when an iterative solver stops before reaching its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_residual, int iterations)
        : Error(ErrorKind::convergence, what),
          last_residual_(last_residual),
          iterations_(iterations) {}

    double last_residual() const noexcept { return last_residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double last_residual_;
    int iterations_;
};

}  // namespace pcf
