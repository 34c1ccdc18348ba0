#include "dualgal/solver.hpp"

#include "dualgal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dualgal {

std::string_view to_string(SolveMethod method) {
    switch (method) {
        case SolveMethod::definite_factorization: return "definite_factorization";
        case SolveMethod::min_norm_least_squares: return "min_norm_least_squares";
    }
    return "unknown";
}

namespace {

double relative_residual(const Eigen::MatrixXd& K, const Eigen::VectorXd& d,
                         const Eigen::VectorXd& f) {
    return (K * d - f).norm() / std::max(1.0, f.norm());
}

}  // namespace

Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& K, const Eigen::VectorXd& f, double rcond,
                               int* rank) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(K, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double cutoff = s.size() > 0 ? rcond * s[0] : 0.0;
    int r = 0;
    while (r < s.size() && s[r] > cutoff) ++r;
    if (rank) *rank = r;
    const Eigen::VectorXd coeff =
        (svd.matrixU().leftCols(r).transpose() * f).cwiseQuotient(s.head(r));
    return svd.matrixV().leftCols(r) * coeff;
}

Eigen::VectorXd min_norm_solve_factored(const Eigen::MatrixXd& A, const Eigen::VectorXd& f,
                                        double rcond, int* rank) {
    if (A.cols() != f.size()) throw ArgumentError("min_norm_solve_factored: size mismatch");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double cutoff = s.size() > 0 ? rcond * s[0] : 0.0;
    int r = 0;
    while (r < s.size() && s[r] > cutoff) ++r;
    if (rank) *rank = r;
    const auto V = svd.matrixV().leftCols(r);
    const Eigen::VectorXd coeff = (V.transpose() * f).cwiseQuotient(s.head(r).cwiseAbs2());
    return V * coeff;
}

namespace {

SolveReport solve_impl(const Eigen::MatrixXd& K, const Eigen::VectorXd& f, const Eigen::MatrixXd* factor,
                       double tol) {
    if (K.rows() != K.cols() || K.rows() != f.size()) {
        throw ArgumentError("solve_symmetric_consistent: size mismatch");
    }
    if (!K.allFinite() || !f.allFinite()) throw ArgumentError("solve_symmetric_consistent: non-finite input");
    const Eigen::Index n = K.rows();
    SolveReport report;
    if (n == 0) {
        report.d = Eigen::VectorXd();
        return report;
    }

    const double max_diag = K.diagonal().cwiseAbs().maxCoeff();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(K);
    bool definite = ldlt.info() == Eigen::Success && max_diag > 0.0;
    if (definite) {
        const double min_pivot = ldlt.vectorD().minCoeff();
        definite = min_pivot > 1e-12 * max_diag;
    }
    if (definite) {
        report.d = ldlt.solve(f);
        report.method = SolveMethod::definite_factorization;
        report.rank_estimate = static_cast<int>(n);
        report.residual = relative_residual(K, report.d, f);
        if (report.d.allFinite() && report.residual <= tol) return report;
    }

    int rank = 0;
    report.d = factor ? min_norm_solve_factored(*factor, f, 1e-12, &rank)
                      : min_norm_solve(K, f, 1e-12, &rank);
    report.method = SolveMethod::min_norm_least_squares;
    report.rank_estimate = rank;
    report.residual = relative_residual(K, report.d, f);
    if (!(report.residual <= tol)) {
        throw InconsistentSystem("dual system is inconsistent (relative residual " +
                                     std::to_string(report.residual) + ")",
                                 report.residual);
    }
    return report;
}

}  // namespace

SolveReport solve_symmetric_consistent(const Eigen::MatrixXd& K, const Eigen::VectorXd& f,
                                       double tol) {
    return solve_impl(K, f, nullptr, tol);
}

SolveReport solve_symmetric_consistent(const AssembledSystem& system, double tol) {
    if (system.factor && system.factor->cols() != system.K.cols()) {
        throw ArgumentError("DtP factor does not match the stiffness matrix");
    }
    return solve_impl(system.K, system.f, system.factor ? &*system.factor : nullptr, tol);
}

}  // namespace dualgal
