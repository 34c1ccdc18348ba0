#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace dualgal {

struct LinearDualResult {
    Eigen::VectorXd lambda_star;
    Eigen::VectorXd x_H;
    /// ||A x_H - b|| / max(1, ||b||)
    double residual = 0.0;
};

/// Solves A x = b through the dual normal equations (A A^T) lambda = b with
/// x_H = A^T lambda. lambda is a minimum-norm solution; the rank cutoff is
/// 1e-12 relative to the largest pivot. Throws InconsistentSystem when the
/// recovered x_H leaves a residual above tol, i.e. b is outside range(A).
LinearDualResult solve_linear_dual(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                   double tol = 1e-10);

struct QuadPairResult {
    Eigen::Vector2d lambda_star;
    double x = 0.0;
    double y = 0.0;
    double beta = 0.0;
    Eigen::Vector2d base;
    int iterations = 0;
    /// Dual function value after every accepted step, starting at lambda = 0.
    std::vector<double> dual_history;
};

/// The primal pair (x, y) generated from (lambda1, lambda2) by the stationarity
/// of beta [(x - xb)^2 + (y - yb)^2] + l1 (3 - x^2 - y^2) + l2 (1 - x^2 + y^2).
Eigen::Vector2d quadratic_pair_dtp(double beta, const Eigen::Vector2d& base,
                                   const Eigen::Vector2d& lambda);
double quadratic_pair_dual(double beta, const Eigen::Vector2d& base,
                           const Eigen::Vector2d& lambda);

/// Maximizes the dual function of x^2 + y^2 = 3, x^2 - y^2 = 1 by damped
/// Newton ascent from lambda = 0. tol bounds the dual gradient norm.
QuadPairResult solve_quadratic_pair(double beta, const Eigen::Vector2d& base, double tol = 1e-10);

struct MaxentResult {
    Eigen::VectorXd phi;
    Eigen::Vector2d lambda_star;
    double partition = 0.0;
    int iterations = 0;
};

/// Maximum-entropy coordinates of `point` with respect to the vertices of a
/// convex polygon listed counterclockwise. Minimizes ln Z(lambda) by Newton
/// with backtracking; tol bounds the gradient norm.
MaxentResult maxent_coordinates(std::span<const Eigen::Vector2d> vertices,
                                const Eigen::Vector2d& point, double tol = 1e-12);

}  // namespace dualgal
