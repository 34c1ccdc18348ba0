#include "dualgal/problems.hpp"

#include "dualgal/errors.hpp"
#include "dualgal/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <thread>

namespace dualgal {

namespace {

constexpr double kPi = std::numbers::pi;

double field_value(const FieldBasis& basis, const Eigen::VectorXd& coeff, double x, double t) {
    const auto e = basis.evaluate(x, t);
    double v = 0.0;
    for (std::size_t k = 0; k < e.indices.size(); ++k) v += coeff[e.indices[k]] * e.values[k];
    return v;
}

void accumulate(const ProblemSpec& spec, Field field, const FieldBasis& basis,
                const Eigen::VectorXd& coeff, double x, double t, PrimalPair& out) {
    const auto e = basis.evaluate(x, t);
    for (std::size_t k = 0; k < e.indices.size(); ++k) {
        const double c = coeff[e.indices[k]];
        if (c == 0.0) continue;
        const auto p = dtp_contribution(spec, field, e.values[k], e.d_dx[k], e.d_dt[k]);
        out.u += c * p.u;
        out.q += c * p.q;
    }
}

}  // namespace

PrimalSolution::PrimalSolution(ProblemSpec spec, DualAnsatz ansatz, Eigen::VectorXd d)
    : spec_(std::move(spec)), ansatz_(std::move(ansatz)), d_(std::move(d)),
      full_(expand_coefficients(ansatz_, d_)) {}

PrimalPair PrimalSolution::evaluate(double x, double t) const {
    PrimalPair out;
    accumulate(spec_, Field::lambda, ansatz_.lambda_basis, full_.lambda, x, t, out);
    if (ansatz_.mu_basis) accumulate(spec_, Field::mu, *ansatz_.mu_basis, full_.mu, x, t, out);
    if (ansatz_.lambda_lift) {
        const auto& lift = *ansatz_.lambda_lift;
        const double dt = lift.d_dt ? lift.d_dt(x, t) : 0.0;
        const auto p = dtp_contribution(spec_, Field::lambda, lift.value(x, t), lift.d_dx(x, t), dt);
        out.u += p.u;
        out.q += p.q;
    }
    return out;
}

double PrimalSolution::lambda(double x, double t) const {
    double v = field_value(ansatz_.lambda_basis, full_.lambda, x, t);
    if (ansatz_.lambda_lift) v += ansatz_.lambda_lift->value(x, t);
    return v;
}

double PrimalSolution::mu(double x, double t) const {
    return ansatz_.mu_basis ? field_value(*ansatz_.mu_basis, full_.mu, x, t) : 0.0;
}

PrimalPair dtp_eval(const PrimalSolution& solution, double x, std::optional<double> t) {
    const auto kind = solution.spec().kind;
    if (is_transient(kind) != t.has_value()) {
        throw ArgumentError(is_transient(kind) ? "transient problems need a time coordinate"
                                               : "time coordinate given for a steady problem");
    }
    if (kind == ProblemKind::ivp_ode) {
        if (!(x >= 0.0 && x <= solution.spec().T)) throw DomainError("time outside [0, T]");
        return solution.evaluate(0.0, x);
    }
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("x outside [0, 1]");
    if (t && !(*t >= 0.0 && *t <= solution.spec().T)) throw DomainError("t outside [0, T]");
    return solution.evaluate(x, t.value_or(0.0));
}

ExactSolution::ExactSolution(const ProblemSpec& spec, int series_terms) : spec_(spec) {
    switch (spec.kind) {
        case ProblemKind::steady_cd:
            if (!(spec.kappa > 0.0)) throw ArgumentError("steady exact solution needs kappa > 0");
            break;
        case ProblemKind::transient_cd: {
            if (!(spec.kappa > 0.0)) throw ArgumentError("series solution needs kappa > 0");
            if (spec.bc_left != 0.0 || spec.bc_right != 0.0) {
                throw ArgumentError("series solution assumes homogeneous boundary values");
            }
            if (series_terms < 1) throw ArgumentError("series needs at least one term");
            // b_n = 2 int exp(-c x) u0(x) sin(n pi x) dx, 20 Gauss points per half-period.
            const double c = spec.alpha / (2.0 * spec.kappa);
            const auto rule = gauss_legendre_rule(20);
            b_.resize(series_terms);
            for (int n = 1; n <= series_terms; ++n) {
                double sum = 0.0;
                for (int k = 0; k < n; ++k) {
                    double cell = 0.0;
                    for (const auto& qp : map_rule(rule, static_cast<double>(k) / n,
                                                   static_cast<double>(k + 1) / n)) {
                        cell += qp.w * std::exp(-c * qp.x) * spec.initial(qp.x) *
                                std::sin(n * kPi * qp.x);
                    }
                    sum += cell;
                }
                b_[n - 1] = 2.0 * sum;
            }
            break;
        }
        case ProblemKind::transient_heat:
            if (!(spec.kappa >= 0.0)) throw ArgumentError("heat exact solution needs kappa >= 0");
            break;
        default: break;
    }
}

ExactValue ExactSolution::operator()(double x, double t) const {
    const auto& s = spec_;
    switch (s.kind) {
        case ProblemKind::laplace_1d:
            return {s.bc_left + (s.bc_right - s.bc_left) * x, s.bc_right - s.bc_left};
        case ProblemKind::steady_cd: {
            const double r = s.alpha / s.kappa;
            const double jump = s.bc_right - s.bc_left;
            if (std::abs(r) < 1e-12) return {s.bc_left + jump * x, jump};
            double shape = 0.0;
            double slope = 0.0;
            if (r > 0.0) {
                const double den = -std::expm1(-r);
                shape = (std::exp(r * (x - 1.0)) - std::exp(-r)) / den;
                slope = r * std::exp(r * (x - 1.0)) / den;
            } else {
                const double den = std::expm1(r);
                shape = std::expm1(r * x) / den;
                slope = r * std::exp(r * x) / den;
            }
            return {s.bc_left + jump * shape, jump * slope};
        }
        case ProblemKind::transient_cd: {
            const double c = s.alpha / (2.0 * s.kappa);
            const double amp = std::exp(-s.alpha * s.alpha / (4.0 * s.kappa) * t + c * x);
            const std::complex<double> rot = std::polar(1.0, kPi * x);
            std::complex<double> z = rot;  // exp(i n pi x)
            double sum = 0.0;
            double dsum = 0.0;
            for (std::size_t n = 1; n <= b_.size(); ++n) {
                const double decay = std::exp(-s.kappa * static_cast<double>(n * n) * kPi * kPi * t);
                if (decay == 0.0) break;
                const double coef = b_[n - 1] * decay;
                sum += coef * z.imag();
                dsum += coef * static_cast<double>(n) * kPi * z.real();
                z *= rot;
                if (n % 64 == 0) z = std::polar(1.0, static_cast<double>(n + 1) * kPi * x);
            }
            return {amp * sum, amp * (c * sum + dsum)};
        }
        case ProblemKind::transient_heat: {
            const double decay = std::exp(-kPi * kPi * s.kappa * t / 4.0);
            return {s.bc_left + std::sin(kPi * x / 2.0) * decay,
                    kPi / 2.0 * std::cos(kPi * x / 2.0) * decay};
        }
        case ProblemKind::ivp_ode: {
            const double u = s.u0 * std::exp(s.a * t);
            return {u, s.a * u};
        }
    }
    throw ArgumentError("no exact solution for this problem kind");
}

ExactValue exact_solution(const ProblemSpec& spec, double x, std::optional<double> t) {
    if (is_transient(spec.kind) && !t) throw ArgumentError("transient exact solution needs t");
    if (spec.kind == ProblemKind::ivp_ode) return ExactSolution(spec)(0.0, x);
    return ExactSolution(spec)(x, t.value_or(0.0));
}

IvpDualValues ivp_dual_closed_form(double a, double u0, double lambda_T, double T, double t) {
    if (!(T > 0.0)) throw ArgumentError("T must be positive");
    IvpDualValues out;
    if (a == 0.0) {
        const double c2 = u0;
        const double c1 = lambda_T - u0 * T;
        out.lambda = c1 + c2 * t;
        out.lambda_dot = c2;
        out.u_H = c2;
        return out;
    }
    const double m = std::abs(a);
    const double e_plus = std::exp(m * T);
    const double e_minus = std::exp(-m * T);
    const double a11 = m + a;
    const double a12 = -(m - a);
    const double det = a11 * e_minus - a12 * e_plus;
    if (!std::isfinite(det) || det == 0.0) {
        throw Degenerate("terminal-value system for the IVP dual is singular");
    }
    const double c1 = (u0 * e_minus - a12 * lambda_T) / det;
    const double c2 = (a11 * lambda_T - e_plus * u0) / det;
    const double gp = std::exp(m * t);
    const double gm = std::exp(-m * t);
    out.lambda = c1 * gp + c2 * gm;
    out.lambda_dot = m * (c1 * gp - c2 * gm);
    out.u_H = out.lambda_dot + a * out.lambda;
    if (!std::isfinite(out.lambda) || !std::isfinite(out.u_H)) {
        throw Degenerate("IVP dual closed form overflows for these parameters");
    }
    return out;
}

namespace {

struct MeshSpec {
    std::vector<double> bx;
    std::vector<double> bt;
    int degree = 1;
};

MeshSpec error_mesh(const DualAnsatz& ans) {
    MeshSpec m;
    std::vector<double> mx, mt;
    m.degree = std::max(ans.lambda_basis.degree_x(), ans.lambda_basis.degree_t());
    if (ans.mu_basis) {
        mx = ans.mu_basis->breakpoints_x();
        mt = ans.mu_basis->breakpoints_t();
        m.degree = std::max({m.degree, ans.mu_basis->degree_x(), ans.mu_basis->degree_t()});
    }
    const auto lx = ans.lambda_basis.breakpoints_x();
    const auto lt = ans.lambda_basis.breakpoints_t();
    if (!lx.empty() || !mx.empty()) m.bx = merge_breakpoints(lx, mx);
    if (!lt.empty() || !mt.empty()) m.bt = merge_breakpoints(lt, mt);
    return m;
}

}  // namespace

ErrorPair error_norms(const PrimalSolution& solution, const ExactSolution& exact, int extra_points) {
    const auto& spec = solution.spec();
    const MeshSpec mesh = error_mesh(solution.ansatz());
    const auto rule = gauss_legendre_rule(std::min(mesh.degree + extra_points, kMaxGaussPoints));

    double eu = 0.0, nu = 0.0, eq = 0.0, nq = 0.0;
    auto visit = [&](double x, double t, double w) {
        const auto h = solution.evaluate(x, t);
        const auto ex = spec.kind == ProblemKind::ivp_ode ? exact(0.0, t) : exact(x, t);
        eu += w * (ex.u - h.u) * (ex.u - h.u);
        nu += w * ex.u * ex.u;
        eq += w * (ex.u_x - h.q) * (ex.u_x - h.q);
        nq += w * ex.u_x * ex.u_x;
    };

    if (!mesh.bx.empty() && !mesh.bt.empty()) {
        for (std::size_t i = 0; i + 1 < mesh.bx.size(); ++i) {
            const auto px = map_rule(rule, mesh.bx[i], mesh.bx[i + 1]);
            for (std::size_t j = 0; j + 1 < mesh.bt.size(); ++j) {
                for (const auto& qx : px) {
                    for (const auto& qt : map_rule(rule, mesh.bt[j], mesh.bt[j + 1])) {
                        visit(qx.x, qt.x, qx.w * qt.w);
                    }
                }
            }
        }
    } else if (!mesh.bx.empty()) {
        for (std::size_t i = 0; i + 1 < mesh.bx.size(); ++i) {
            for (const auto& qp : map_rule(rule, mesh.bx[i], mesh.bx[i + 1])) visit(qp.x, 0.0, qp.w);
        }
    } else {
        for (std::size_t j = 0; j + 1 < mesh.bt.size(); ++j) {
            for (const auto& qp : map_rule(rule, mesh.bt[j], mesh.bt[j + 1])) visit(0.0, qp.x, qp.w);
        }
    }

    ErrorPair out;
    out.dof = solution.ansatz().n_dof();
    out.E_u = nu > 0.0 ? std::sqrt(eu / nu) : std::sqrt(eu);
    // The IVP has no flux field.
    if (spec.kind != ProblemKind::ivp_ode) out.E_q = nq > 0.0 ? std::sqrt(eq / nq) : std::sqrt(eq);
    return out;
}

ErrorPair error_norms(const PrimalSolution& solution) {
    return error_norms(solution, ExactSolution(solution.spec()));
}

MaxErrors max_errors(const PrimalSolution& solution, const ExactSolution& exact, int nx, int nt,
                     double t_max) {
    if (nx < 2) throw ArgumentError("error grid needs at least two points");
    const auto& spec = solution.spec();
    MaxErrors m;
    auto visit = [&](double x, double t, bool has_q) {
        const auto h = solution.evaluate(x, t);
        const auto ex = spec.kind == ProblemKind::ivp_ode ? exact(0.0, t) : exact(x, t);
        m.u = std::max(m.u, std::abs(ex.u - h.u));
        m.u_scale = std::max(m.u_scale, std::abs(ex.u));
        if (has_q) {
            m.q = std::max(m.q, std::abs(ex.u_x - h.q));
            m.q_scale = std::max(m.q_scale, std::abs(ex.u_x));
        }
    };
    if (spec.kind == ProblemKind::ivp_ode) {
        for (int i = 0; i < nx; ++i) visit(0.0, spec.T * i / (nx - 1), false);
    } else if (is_transient(spec.kind)) {
        if (nt < 2) throw ArgumentError("space-time error grid needs nt >= 2");
        if (!(t_max > 0.0 && t_max <= spec.T)) throw ArgumentError("t_max must lie in (0, T]");
        for (int j = 0; j < nt; ++j) {
            const double t = j == nt - 1 ? t_max : t_max * j / (nt - 1);
            for (int i = 0; i < nx; ++i) visit(static_cast<double>(i) / (nx - 1), t, true);
        }
    } else {
        for (int i = 0; i < nx; ++i) visit(static_cast<double>(i) / (nx - 1), 0.0, true);
    }
    return m;
}

SolvedProblem solve_problem(const ProblemSpec& spec, const BasisConfig& lambda_cfg,
                            const BasisConfig& mu_cfg, const AssemblyOptions& options, double tol) {
    DualAnsatz ansatz = build_dual_ansatz(spec, lambda_cfg, mu_cfg);
    AssemblyOptions opts = options;
    // Frames are rank deficient; keep the DtP factor for the least-squares path.
    if (lambda_cfg.family == BasisFamily::repu || mu_cfg.family == BasisFamily::repu) {
        opts.keep_factor = true;
    }
    AssembledSystem system = assemble(spec, ansatz, opts);
    SolveReport report = solve_symmetric_consistent(system, tol);
    PrimalSolution solution(spec, std::move(ansatz), report.d);
    return {std::move(system), std::move(report), std::move(solution)};
}

double fit_log_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ArgumentError("slope fit needs two or more pairs");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double lx = std::log(x[k]);
        const double ly = std::log(std::max(y[k], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw ArgumentError("slope fit needs distinct abscissae");
    return (n * sxy - sx * sy) / den;
}

ConvergenceRecord convergence_study(const ProblemSpec& spec, BasisFamily family, int p, int q,
                                    std::span<const int> n_list, const StudyOptions& options) {
    if (n_list.size() < 3) throw ArgumentError("convergence study needs at least three refinements");
    for (std::size_t k = 1; k < n_list.size(); ++k) {
        if (n_list[k] <= n_list[k - 1]) throw ArgumentError("n_list must be strictly increasing");
    }
    if (family == BasisFamily::polynomial) throw ArgumentError("refinement needs a spline or RePU family");
    if (options.fit_points == 1 || options.fit_points < 0) {
        throw ArgumentError("slope fit needs at least two levels");
    }
    spec.validate();
    const ExactSolution exact(spec);

    ConvergenceRecord rec;
    rec.levels.resize(n_list.size());
    std::vector<std::exception_ptr> errors(n_list.size());
    auto run = [&](std::size_t k) {
        try {
            const BasisConfig lam{family, q, n_list[k], {}};
            const BasisConfig mu{family, p, n_list[k], {}};
            const auto solved = solve_problem(spec, lam, mu, {}, options.tol);
            rec.levels[k] = {n_list[k], error_norms(solved.solution, exact), solved.report.method,
                             solved.report.residual};
        } catch (...) {
            errors[k] = std::current_exception();
        }
    };
    const int workers = std::clamp(options.workers, 1, static_cast<int>(n_list.size()));
    if (workers == 1) {
        for (std::size_t k = 0; k < n_list.size(); ++k) run(k);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t k = w; k < n_list.size(); k += workers) run(k);
            });
        }
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    std::size_t first = 0;
    if (options.fit_points > 0) {
        const auto keep = static_cast<std::size_t>(options.fit_points);
        if (keep < rec.levels.size()) first = rec.levels.size() - keep;
    }
    std::vector<double> dof, eu, eq;
    for (std::size_t k = first; k < rec.levels.size(); ++k) {
        const auto& l = rec.levels[k];
        dof.push_back(l.errors.dof);
        eu.push_back(l.errors.E_u);
        eq.push_back(l.errors.E_q);
    }
    rec.rate_u = -fit_log_slope(dof, eu);
    rec.rate_q = spec.kind == ProblemKind::ivp_ode ? 0.0 : -fit_log_slope(dof, eq);
    return rec;
}

double adjoint_sensitivity(double a, double T, int steps) {
    if (!(T > 0.0)) throw ArgumentError("T must be positive");
    if (steps < 1) throw ArgumentError("step count must be positive");
    auto rhs = [a](double lambda) { return -a * lambda - 1.0; };
    const double h = -T / steps;
    double lambda = 0.0;
    for (int k = 0; k < steps; ++k) {
        const double k1 = rhs(lambda);
        const double k2 = rhs(lambda + 0.5 * h * k1);
        const double k3 = rhs(lambda + 0.5 * h * k2);
        const double k4 = rhs(lambda + h * k3);
        lambda += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return lambda;
}

double adjoint_sensitivity_closed_form(double a, double T) {
    if (std::abs(a * T) < 1e-8) return T * (1.0 + 0.5 * a * T);
    return std::expm1(a * T) / a;
}

}  // namespace dualgal
