#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ecfv {

/// Non-positive density or pressure (or an entropy-variable vector with v3 >= 0).
class InvalidStateError : public std::runtime_error {
public:
    InvalidStateError(const std::string& what, double offending)
        : std::runtime_error(what), value_(offending) {}

    double value() const noexcept { return value_; }

private:
    double value_;
};

/// A quadrature node on a straight path (in v or u space) left the admissible set.
class PathInvalidError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Explicit update produced an inadmissible cell.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(const std::string& what, std::size_t step, std::size_t cell)
        : std::runtime_error(what), step_(step), cell_(cell) {}

    std::size_t step() const noexcept { return step_; }
    std::size_t cell() const noexcept { return cell_; }

private:
    std::size_t step_;
    std::size_t cell_;
};

/// Newton did not converge, the line search stagnated, or the linear solve failed.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double final_residual)
        : std::runtime_error(what), residual_(final_residual) {}

    double final_residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Bad configuration or API misuse.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace ecfv
