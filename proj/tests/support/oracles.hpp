#pragma once

// Test-only reference implementations. Each one is written independently of
// the library code it checks (different algorithm or brute force), so an
// agreement between the two is evidence rather than a tautology.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

/// Textbook Cox-de Boor recursion N_{i,p}(x), right-continuous, with the last
/// non-degenerate span closed at the right end of the knot vector.
inline double cox_de_boor(const std::vector<double>& U, int i, int p, double x) {
    if (p == 0) {
        const double a = U[i];
        const double b = U[i + 1];
        if (x >= a && x < b) return 1.0;
        // Closed right end: the last non-empty span owns x == U.back().
        if (x == U.back() && b == U.back() && a < b) return 1.0;
        return 0.0;
    }
    double left = 0.0;
    double right = 0.0;
    const double d1 = U[i + p] - U[i];
    const double d2 = U[i + p + 1] - U[i + 1];
    if (d1 > 0.0) left = (x - U[i]) / d1 * cox_de_boor(U, i, p - 1, x);
    if (d2 > 0.0) right = (U[i + p + 1] - x) / d2 * cox_de_boor(U, i + 1, p - 1, x);
    return left + right;
}

/// dN_{i,p}/dx from the recursive derivative identity.
inline double cox_de_boor_derivative(const std::vector<double>& U, int i, int p, double x) {
    if (p == 0) return 0.0;
    double d = 0.0;
    const double d1 = U[i + p] - U[i];
    const double d2 = U[i + p + 1] - U[i + 1];
    if (d1 > 0.0) d += p / d1 * cox_de_boor(U, i, p - 1, x);
    if (d2 > 0.0) d -= p / d2 * cox_de_boor(U, i + 1, p - 1, x);
    return d;
}

inline std::vector<double> open_uniform_knots(int p, int n, double lo = 0.0, double hi = 1.0) {
    std::vector<double> U(p + 1, lo);
    for (int k = 1; k < n; ++k) U.push_back(lo + (hi - lo) * k / n);
    U.insert(U.end(), p + 1, hi);
    return U;
}

inline double central_difference(const std::function<double(double)>& f, double x, double h = 1e-6) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Golub-Welsch: Gauss-Legendre nodes are the eigenvalues of the Jacobi matrix,
/// weights 2 v_0^2 from the normalized eigenvectors.
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline Rule golub_welsch(int n) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        J(k, k - 1) = b;
        J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    Rule r;
    for (int k = 0; k < n; ++k) {
        r.nodes.push_back(es.eigenvalues()[k]);
        const double v0 = es.eigenvectors()(0, k);
        r.weights.push_back(2.0 * v0 * v0);
    }
    return r;
}

/// Composite Gauss integral of f over [lo, hi] split into `pieces` equal parts.
inline double integrate(const std::function<double(double)>& f, double lo, double hi,
                        int pieces = 64, int points = 12) {
    const Rule r = golub_welsch(points);
    double sum = 0.0;
    const double h = (hi - lo) / pieces;
    for (int c = 0; c < pieces; ++c) {
        const double a = lo + c * h;
        for (int k = 0; k < points; ++k) {
            sum += 0.5 * h * r.weights[k] * f(a + 0.5 * h * (r.nodes[k] + 1.0));
        }
    }
    return sum;
}

inline double integrate_2d(const std::function<double(double, double)>& f, int pieces = 16,
                           int points = 12) {
    const Rule r = golub_welsch(points);
    double sum = 0.0;
    const double h = 1.0 / pieces;
    for (int cx = 0; cx < pieces; ++cx) {
        for (int ct = 0; ct < pieces; ++ct) {
            for (int i = 0; i < points; ++i) {
                for (int j = 0; j < points; ++j) {
                    const double x = cx * h + 0.5 * h * (r.nodes[i] + 1.0);
                    const double t = ct * h + 0.5 * h * (r.nodes[j] + 1.0);
                    sum += 0.25 * h * h * r.weights[i] * r.weights[j] * f(x, t);
                }
            }
        }
    }
    return sum;
}

/// Moore-Penrose pseudoinverse from a full two-sided Jacobi SVD.
inline Eigen::MatrixXd pinv(const Eigen::MatrixXd& A, double rcond = 1e-12) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(A.cols(), A.rows());
    const double cut = s.size() ? rcond * s[0] : 0.0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (s[k] > cut) S(k, k) = 1.0 / s[k];
    }
    return svd.matrixV() * S * svd.matrixU().transpose();
}

/// Seeded generator so every randomized test is reproducible.
inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Eigen::MatrixXd random_matrix(std::mt19937_64& gen, int rows, int cols) {
    std::normal_distribution<double> nd;
    Eigen::MatrixXd A(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) A(i, j) = nd(gen);
    }
    return A;
}

/// rows x cols matrix of the given rank.
inline Eigen::MatrixXd random_rank_matrix(std::mt19937_64& gen, int rows, int cols, int rank) {
    return random_matrix(gen, rows, rank) * random_matrix(gen, rank, cols);
}

/// A vector with a unit component orthogonal to range(A), so A x = b has no solution.
inline Eigen::VectorXd outside_range(std::mt19937_64& gen, const Eigen::MatrixXd& A) {
    Eigen::VectorXd r = random_matrix(gen, static_cast<int>(A.rows()), 1).col(0);
    const Eigen::MatrixXd P = A * pinv(A);
    Eigen::VectorXd perp = r - P * r;
    return A * random_matrix(gen, static_cast<int>(A.cols()), 1).col(0) + perp / perp.norm();
}

}  // namespace oracle
