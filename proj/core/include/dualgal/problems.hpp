#pragma once

#include "dualgal/assembly.hpp"
#include "dualgal/problem_spec.hpp"
#include "dualgal/solver.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace dualgal {

/// Primal fields recovered from a dual coefficient vector through the DtP map.
class PrimalSolution {
public:
    PrimalSolution(ProblemSpec spec, DualAnsatz ansatz, Eigen::VectorXd d);

    const ProblemSpec& spec() const { return spec_; }
    const DualAnsatz& ansatz() const { return ansatz_; }
    const Eigen::VectorXd& coefficients() const { return d_; }
    const DualCoefficients& full_coefficients() const { return full_; }

    /// (u_H, q_H) at (x, t). The IVP reads its time from t; the steady kinds ignore t.
    PrimalPair evaluate(double x, double t) const;
    double lambda(double x, double t) const;
    double mu(double x, double t) const;

private:
    ProblemSpec spec_;
    DualAnsatz ansatz_;
    Eigen::VectorXd d_;
    DualCoefficients full_;
};

/// For the IVP the single coordinate is time and is passed as x.
PrimalPair dtp_eval(const PrimalSolution& solution, double x, std::optional<double> t = std::nullopt);

struct ExactValue {
    double u = 0.0;
    double u_x = 0.0;
};

/// Reference solutions of the model problems. The transient convection-diffusion
/// series coefficients are computed once at construction.
class ExactSolution {
public:
    explicit ExactSolution(const ProblemSpec& spec, int series_terms = 1000);

    /// For the IVP, t is the time and u_x holds du/dt.
    ExactValue operator()(double x, double t) const;
    const std::vector<double>& series_coefficients() const { return b_; }

private:
    ProblemSpec spec_;
    std::vector<double> b_;
};

ExactValue exact_solution(const ProblemSpec& spec, double x, std::optional<double> t = std::nullopt);

struct IvpDualValues {
    double lambda = 0.0;
    double lambda_dot = 0.0;
    double u_H = 0.0;
};

/// Closed-form solution of lambda'' = a^2 lambda, lambda'(0) + a lambda(0) = u0,
/// lambda(T) = lambda_T, and the primal value u_H = lambda' + a lambda.
IvpDualValues ivp_dual_closed_form(double a, double u0, double lambda_T, double T, double t);

struct ErrorPair {
    double E_u = 0.0;
    double E_q = 0.0;
    int dof = 0;
};

/// Relative L2 error in u and relative L2 error of q_H against u_x, integrated
/// per span (per space-time cell for transient kinds) with max degree + extra
/// Gauss points per direction.
ErrorPair error_norms(const PrimalSolution& solution, const ExactSolution& exact, int extra_points = 3);
ErrorPair error_norms(const PrimalSolution& solution);

struct MaxErrors {
    double u = 0.0;        ///< max |u - u_H|
    double q = 0.0;        ///< max |u_x - q_H|
    double u_scale = 0.0;  ///< max |u|
    double q_scale = 0.0;  ///< max |u_x|

    double relative_u() const { return u_scale > 0.0 ? u / u_scale : u; }
    double relative_q() const { return q_scale > 0.0 ? q / q_scale : q; }
};

/// Max-norm errors on a uniform grid with nx points in space over [0, 1] and nt
/// points in time over [0, t_max]. Non-transient kinds ignore nt and t_max
/// (the IVP grid runs over [0, T] with nx points).
MaxErrors max_errors(const PrimalSolution& solution, const ExactSolution& exact, int nx, int nt = 1,
                     double t_max = 1.0);

/// Full pipeline for one configuration.
struct SolvedProblem {
    AssembledSystem system;
    SolveReport report;
    PrimalSolution solution;
};
SolvedProblem solve_problem(const ProblemSpec& spec, const BasisConfig& lambda_cfg,
                            const BasisConfig& mu_cfg, const AssemblyOptions& options = {},
                            double tol = 1e-9);

struct ConvergenceLevel {
    int n = 0;
    ErrorPair errors;
    SolveMethod method = SolveMethod::definite_factorization;
    double residual = 0.0;
};

struct ConvergenceRecord {
    std::vector<ConvergenceLevel> levels;
    double rate_u = 0.0;
    double rate_q = 0.0;
};

struct StudyOptions {
    /// Refinement levels solved concurrently.
    int workers = 1;
    double tol = 1e-9;
    /// Slopes are fitted over the finest fit_points levels (0 = all). Coarse
    /// levels sit in the pre-asymptotic range for convection-dominated cases.
    int fit_points = 3;
};

/// Solves each refinement with mu degree p and lambda degree q, then fits the
/// log-log slopes -d log E / d log dof by least squares.
ConvergenceRecord convergence_study(const ProblemSpec& spec, BasisFamily family, int p, int q,
                                    std::span<const int> n_list, const StudyOptions& options = {});

/// Least-squares slope of log y against log x.
double fit_log_slope(std::span<const double> x, std::span<const double> y);

/// dF/dp for F = int_0^T u dt, du/dt = a u, u(0) = p: integrates the
/// adjoint lambda' + a lambda + 1 = 0 backward from lambda(T) = 0 with classical
/// Runge-Kutta and returns lambda(0).
double adjoint_sensitivity(double a, double T, int steps = 1000);
/// (e^{aT} - 1) / a, with the a -> 0 limit T.
double adjoint_sensitivity_closed_form(double a, double T);

}  // namespace dualgal
