#include "dualgal/duality_core.hpp"

#include "dualgal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dualgal {

LinearDualResult solve_linear_dual(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                   double tol) {
    if (A.rows() != b.size()) throw ArgumentError("solve_linear_dual: A and b disagree in size");
    if (A.size() == 0) throw ArgumentError("solve_linear_dual: empty matrix");
    if (!A.allFinite() || !b.allFinite()) throw ArgumentError("solve_linear_dual: non-finite input");

    const Eigen::MatrixXd M = A * A.transpose();
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(1e-12);
    cod.compute(M);

    LinearDualResult out;
    out.lambda_star = cod.solve(b);
    out.x_H = A.transpose() * out.lambda_star;
    out.residual = (A * out.x_H - b).norm() / std::max(1.0, b.norm());
    if (!(out.residual <= tol)) {
        throw InconsistentSystem("right-hand side is not in the range of A (relative residual " +
                                     std::to_string(out.residual) + ")",
                                 out.residual);
    }
    return out;
}

namespace {

struct PairDenominators {
    double dx;
    double dy;
};

PairDenominators pair_denominators(double beta, const Eigen::Vector2d& l) {
    return {beta - l[0] - l[1], beta - l[0] + l[1]};
}

}  // namespace

Eigen::Vector2d quadratic_pair_dtp(double beta, const Eigen::Vector2d& base,
                                   const Eigen::Vector2d& lambda) {
    const auto den = pair_denominators(beta, lambda);
    if (std::abs(den.dx) < 1e-8 || std::abs(den.dy) < 1e-8) {
        throw SingularDtP("dual point lies on a pole of the quadratic-pair DtP map");
    }
    return {beta * base[0] / den.dx, beta * base[1] / den.dy};
}

double quadratic_pair_dual(double beta, const Eigen::Vector2d& base,
                           const Eigen::Vector2d& lambda) {
    const Eigen::Vector2d p = quadratic_pair_dtp(beta, base, lambda);
    const double x2 = p[0] * p[0];
    const double y2 = p[1] * p[1];
    return beta * ((p[0] - base[0]) * (p[0] - base[0]) + (p[1] - base[1]) * (p[1] - base[1])) +
           lambda[0] * (3.0 - x2 - y2) + lambda[1] * (1.0 - x2 + y2);
}

QuadPairResult solve_quadratic_pair(double beta, const Eigen::Vector2d& base, double tol) {
    if (beta == 0.0 || !std::isfinite(beta)) throw ArgumentError("beta must be finite and nonzero");
    if (!base.allFinite()) throw ArgumentError("base state must be finite");

    constexpr int kMaxIterations = 100;
    Eigen::Vector2d lambda = Eigen::Vector2d::Zero();
    const auto den0 = pair_denominators(beta, lambda);

    QuadPairResult out;
    out.beta = beta;
    out.base = base;
    double value = quadratic_pair_dual(beta, base, lambda);
    out.dual_history.push_back(value);

    for (int iter = 0; iter <= kMaxIterations; ++iter) {
        const Eigen::Vector2d p = quadratic_pair_dtp(beta, base, lambda);
        const double x2 = p[0] * p[0];
        const double y2 = p[1] * p[1];
        const Eigen::Vector2d grad(3.0 - x2 - y2, 1.0 - x2 + y2);
        if (grad.norm() <= tol) {
            out.lambda_star = lambda;
            out.x = p[0];
            out.y = p[1];
            out.iterations = iter;
            return out;
        }
        if (iter == kMaxIterations) break;

        const auto den = pair_denominators(beta, lambda);
        const double a = 2.0 * x2 / den.dx;
        const double c = 2.0 * y2 / den.dy;
        Eigen::Matrix2d hess;
        hess << -a - c, -a + c, -a + c, -a - c;
        Eigen::Vector2d step = hess.fullPivLu().solve(-grad);
        // Fall back to gradient ascent where the Hessian is not negative definite.
        if (!step.allFinite() || step.dot(grad) <= 0.0) step = grad;

        double t = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
            const Eigen::Vector2d trial = lambda + t * step;
            const auto dt = pair_denominators(beta, trial);
            // Stay on the branch of the starting point: no denominator may change sign.
            if (dt.dx * den0.dx <= 0.0 || dt.dy * den0.dy <= 0.0) continue;
            if (std::abs(dt.dx) < 1e-8 || std::abs(dt.dy) < 1e-8) continue;
            const double trial_value = quadratic_pair_dual(beta, base, trial);
            if (trial_value >= value) {
                lambda = trial;
                value = trial_value;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            const auto dl = pair_denominators(beta, lambda + step);
            if (dl.dx * den0.dx <= 0.0 || dl.dy * den0.dy <= 0.0) {
                throw SingularDtP("Newton step for the quadratic pair cannot avoid a DtP pole");
            }
            throw NoConvergence("quadratic pair ascent stalled before reaching tolerance");
        }
        out.dual_history.push_back(value);
    }
    throw NoConvergence("quadratic pair ascent did not converge in 100 iterations");
}

namespace {

void check_polygon_interior(std::span<const Eigen::Vector2d> v, const Eigen::Vector2d& point) {
    const std::size_t n = v.size();
    double scale = 0.0;
    for (const auto& p : v) scale = std::max(scale, p.cwiseAbs().maxCoeff());
    scale = std::max(scale, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector2d e = v[(i + 1) % n] - v[i];
        const Eigen::Vector2d next = v[(i + 2) % n] - v[(i + 1) % n];
        if (e.x() * next.y() - e.y() * next.x() <= 0.0) {
            throw ArgumentError("polygon must be convex, counterclockwise, without collinear vertices");
        }
        const Eigen::Vector2d r = point - v[i];
        if (e.x() * r.y() - e.y() * r.x() <= 1e-14 * scale * scale) {
            throw DomainError("query point is not strictly inside the polygon");
        }
    }
}

}  // namespace

MaxentResult maxent_coordinates(std::span<const Eigen::Vector2d> vertices,
                                const Eigen::Vector2d& point, double tol) {
    if (vertices.size() < 3) throw ArgumentError("polygon needs at least three vertices");
    if (!point.allFinite()) throw DomainError("query point is not finite");
    check_polygon_interior(vertices, point);

    const int n = static_cast<int>(vertices.size());
    Eigen::MatrixXd shifted(n, 2);
    for (int i = 0; i < n; ++i) shifted.row(i) = (vertices[i] - point).transpose();

    // ln Z with the largest exponent factored out; phi comes along for free.
    auto log_partition = [&](const Eigen::Vector2d& lambda, Eigen::VectorXd* phi) {
        const Eigen::VectorXd e = -(shifted * lambda);
        const double m = e.maxCoeff();
        const Eigen::VectorXd z = (e.array() - m).exp();
        const double s = z.sum();
        if (phi) *phi = z / s;
        return m + std::log(s);
    };

    constexpr int kMaxIterations = 100;
    Eigen::Vector2d lambda = Eigen::Vector2d::Zero();
    Eigen::VectorXd phi;
    double value = log_partition(lambda, &phi);

    for (int iter = 0; iter <= kMaxIterations; ++iter) {
        const Eigen::Vector2d mean = shifted.transpose() * phi;
        const Eigen::Vector2d grad = -mean;
        if (grad.norm() <= tol) {
            MaxentResult out;
            out.phi = phi;
            out.lambda_star = lambda;
            out.partition = std::exp(value);
            out.iterations = iter;
            return out;
        }
        if (iter == kMaxIterations) break;

        const Eigen::MatrixXd centered = shifted.rowwise() - mean.transpose();
        const Eigen::Matrix2d hess = centered.transpose() * phi.asDiagonal() * centered;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(hess);
        const double lo = eig.eigenvalues()[0];
        const double hi = eig.eigenvalues()[1];
        if (!(lo > std::numeric_limits<double>::epsilon() * std::max(hi, 1e-300)) || !(hi > 0.0)) {
            throw Degenerate("entropy Hessian is numerically singular; point too close to the boundary");
        }
        const Eigen::Vector2d step = -hess.ldlt().solve(grad);

        // Once the predicted decrease drops below the rounding level of ln Z the
        // sufficient-decrease test is noise; take the pure Newton step.
        if (-grad.dot(step) <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(value))) {
            lambda += step;
            value = log_partition(lambda, &phi);
            continue;
        }

        double t = 1.0;
        Eigen::VectorXd trial_phi;
        bool accepted = false;
        for (int k = 0; k < 60; ++k, t *= 0.5) {
            const Eigen::Vector2d trial = lambda + t * step;
            const double trial_value = log_partition(trial, &trial_phi);
            if (trial_value <= value + 1e-4 * t * grad.dot(step) ||
                (trial_value <= value && t < 1e-6)) {
                lambda = trial;
                value = trial_value;
                phi = trial_phi;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // Line search cannot improve further: accept the current iterate if
            // the gradient is already at rounding level.
            if (grad.norm() <= 1e3 * tol) {
                MaxentResult out;
                out.phi = phi;
                out.lambda_star = lambda;
                out.partition = std::exp(value);
                out.iterations = iter;
                return out;
            }
            throw Degenerate("entropy line search failed; point too close to the boundary");
        }
    }
    throw NoConvergence("maximum-entropy Newton iteration did not converge");
}

}  // namespace dualgal
