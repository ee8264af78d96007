#pragma once

#include <stdexcept>
#include <string>

namespace cascade {

// Base for every failure of the numerical machinery (as opposed to bad
// arguments or I/O trouble). The CLI maps these to exit code 3.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularJacobian : NumericalError {
    explicit SingularJacobian(const std::string& msg) : NumericalError(msg) {}
};

struct NonConvergence : NumericalError {
    NonConvergence(const std::string& msg, double residual_norm)
        : NumericalError(msg + " (residual " + std::to_string(residual_norm) + ")"),
          residual(residual_norm) {}
    double residual;
};

}  // namespace cascade
