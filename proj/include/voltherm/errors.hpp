#pragma once

#include <stdexcept>
#include <string>

namespace voltherm {

// Base class for all library errors. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input documents (JSON syntax, missing required fields).
class ParseError : public Error {
public:
    using Error::Error;
};

// Structurally valid input that violates a model invariant
// (monotonicity, dangling references, bad numeric ranges, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Query outside a characterized domain. Never extrapolated.
class RangeError : public Error {
public:
    using Error::Error;
};

// No voltage pair can satisfy the active timing constraint.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

// Converged junction temperature exceeds the allowed maximum.
class JunctionCapError : public Error {
public:
    JunctionCapError(const std::string& msg, double max_t_c)
        : Error(msg), max_t_c(max_t_c) {}
    double max_t_c;
};

// An iterative solver hit its iteration cap before meeting tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

} // namespace voltherm
