#pragma once

#include <stdexcept>
#include <string>

namespace sdt {

// Error taxonomy: every throw site picks the narrowest category that fits.
// All of these derive from std::runtime_error so callers can catch coarsely.

// Bad argument values: tuning parameters out of range, malformed shapes,
// invalid parameter vectors, inconsistent supports.
struct InvalidArgumentError : std::runtime_error {
    explicit InvalidArgumentError(const std::string& what) : std::runtime_error(what) {}
};

// Numerically ill-posed evaluation: divergent integrand at a support point,
// non-PSD matrix beyond tolerance, shift vector outside the admissible range.
struct EvaluationError : std::runtime_error {
    explicit EvaluationError(const std::string& what) : std::runtime_error(what) {}
};

// An iterative routine exhausted its budget or could not locate a solution.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Requested combination not supported (e.g. smoothing a discrete model).
struct UnsupportedError : std::runtime_error {
    explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

// I/O and parsing failures; message carries file/row context.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sdt
