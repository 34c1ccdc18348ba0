#pragma once

#include <stdexcept>
#include <string>

namespace dualgal {

/// Invalid configuration or argument (bad degree, empty breakpoint list, ...).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Evaluation point outside the domain of a basis, polygon or problem.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A linear system whose right-hand side is not in the range of its matrix.
/// Carries the relative residual of the best available solution.
class InconsistentSystem : public std::runtime_error {
public:
    InconsistentSystem(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A dual iterate reached a pole of the dual-to-primal map.
class SingularDtP : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerically singular local problem (e.g. a query point too close to a polygon edge).
class Degenerate : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dualgal
