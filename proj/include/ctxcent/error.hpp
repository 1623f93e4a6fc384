#pragma once

#include <stdexcept>
#include <string>

namespace ctxcent {

// Bad inputs: violated preconditions, unparsable files, invalid configs.
// The CLI maps these to exit code 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An iterative solver ran out of iterations.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double last_residual)
        : std::runtime_error(what), last_residual_(last_residual) {}

    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

// A series accumulation left the finite double range.
class OverflowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ctxcent
