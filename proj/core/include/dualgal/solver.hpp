#pragma once

#include "dualgal/assembly.hpp"

#include <Eigen/Dense>

#include <string_view>

namespace dualgal {

enum class SolveMethod { definite_factorization, min_norm_least_squares };

std::string_view to_string(SolveMethod method);

struct SolveReport {
    Eigen::VectorXd d;
    SolveMethod method = SolveMethod::definite_factorization;
    /// ||K d - f|| / max(1, ||f||)
    double residual = 0.0;
    int rank_estimate = 0;
};

/// Solves K d = f for symmetric K. A symmetric LDL^T factorization is used when
/// every pivot exceeds 1e-12 times the largest diagonal entry; otherwise, or if
/// that solve misses the tolerance, the minimum-norm least-squares solution is
/// computed from an SVD with relative cutoff 1e-12. Throws InconsistentSystem if
/// the final relative residual exceeds tol.
SolveReport solve_symmetric_consistent(const Eigen::MatrixXd& K, const Eigen::VectorXd& f,
                                       double tol = 1e-9);
/// When the system carries its DtP factor A (K = A^T A), the least-squares
/// path decomposes A instead of K and applies the 1e-12 cutoff to the singular
/// values of A, which keeps the small but genuine directions of RePU frames.
SolveReport solve_symmetric_consistent(const AssembledSystem& system, double tol = 1e-9);

/// Minimum-norm least-squares solution of K d = f with singular values below
/// rcond * sigma_max discarded. rank receives the number of retained values.
Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& K, const Eigen::VectorXd& f,
                               double rcond = 1e-12, int* rank = nullptr);

/// Minimum-norm solution of (A^T A) d = f from an SVD of A, keeping singular
/// values of A above rcond * sigma_max.
Eigen::VectorXd min_norm_solve_factored(const Eigen::MatrixXd& A, const Eigen::VectorXd& f,
                                        double rcond = 1e-12, int* rank = nullptr);

}  // namespace dualgal
