#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crn {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument (negative concentration, dimension mismatch, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Syntax error in a network description, with 1-based position.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// A network that violates one of the structural conditions.
///
/// condition() is 1 (species never used), 2 (trivial reaction y -> y),
/// 3 (complex not used by any reaction) or 0 for the positivity checks on
/// rates and diffusion coefficients.
class ValidationError : public Error {
public:
    ValidationError(int condition, const std::string& what)
        : Error(condition > 0 ? "condition (" + std::to_string(condition) + ") violated: " + what : what),
          condition_(condition) {}

    int condition() const noexcept { return condition_; }

private:
    int condition_;
};

class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, double best_residual)
        : Error(what + " (best residual " + std::to_string(best_residual) + ")"), best_residual_(best_residual) {}

    double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

class NotComplexBalanced : public Error {
public:
    NotComplexBalanced(const std::string& what, double best_residual)
        : Error(what + " (best relative residual " + std::to_string(best_residual) + ")"),
          best_residual_(best_residual) {}

    double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

class SupportLimitExceeded : public Error {
public:
    using Error::Error;
};

class BoundaryEquilibriaPresent : public Error {
public:
    using Error::Error;
};

class ProjectionFailure : public Error {
public:
    using Error::Error;
};

class BlowUp : public Error {
public:
    BlowUp(const std::string& what, double time) : Error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class LinearSolveFailure : public Error {
public:
    using Error::Error;
};

} // namespace crn
