#include "dualgal/assembly.hpp"

#include "dualgal/errors.hpp"
#include "dualgal/quadrature.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <thread>

namespace dualgal {

FieldBasis::FieldBasis(BasisSet1D basis, Axis axis) : basis_(std::move(basis)), axis_(axis) {}

FieldBasis::FieldBasis(TensorBasis2D basis) : basis_(std::move(basis)) {}

int FieldBasis::n_funcs() const {
    return is_tensor() ? tensor().n_funcs() : univariate().n_funcs();
}

const BasisSet1D& FieldBasis::univariate() const {
    if (is_tensor()) throw ArgumentError("field basis is a tensor product");
    return std::get<BasisSet1D>(basis_);
}

const TensorBasis2D& FieldBasis::tensor() const {
    if (!is_tensor()) throw ArgumentError("field basis is univariate");
    return std::get<TensorBasis2D>(basis_);
}

std::vector<double> FieldBasis::breakpoints_x() const {
    if (is_tensor()) return tensor().basis_x().sites();
    return axis_ == Axis::space ? univariate().sites() : std::vector<double>{};
}

std::vector<double> FieldBasis::breakpoints_t() const {
    if (is_tensor()) return tensor().basis_t().sites();
    return axis_ == Axis::time ? univariate().sites() : std::vector<double>{};
}

int FieldBasis::degree_x() const {
    if (is_tensor()) return tensor().basis_x().polynomial_degree();
    return axis_ == Axis::space ? univariate().polynomial_degree() : 0;
}

int FieldBasis::degree_t() const {
    if (is_tensor()) return tensor().basis_t().polynomial_degree();
    return axis_ == Axis::time ? univariate().polynomial_degree() : 0;
}

FieldEval FieldBasis::evaluate(double x, double t) const {
    FieldEval out;
    if (is_tensor()) {
        auto e = eval_tensor_2d(tensor(), x, t);
        out.indices = std::move(e.indices);
        out.values = std::move(e.values);
        out.d_dx = std::move(e.d_dx);
        out.d_dt = std::move(e.d_dt);
        return out;
    }
    auto e = univariate().evaluate(axis_ == Axis::space ? x : t);
    out.indices = std::move(e.indices);
    out.values = std::move(e.values);
    std::vector<double> zeros(out.indices.size(), 0.0);
    if (axis_ == Axis::space) {
        out.d_dx = std::move(e.derivatives);
        out.d_dt = std::move(zeros);
    } else {
        out.d_dx = std::move(zeros);
        out.d_dt = std::move(e.derivatives);
    }
    return out;
}

int DualAnsatz::n_free_lambda() const {
    return static_cast<int>(std::count(lambda_free.begin(), lambda_free.end(), true));
}

int DualAnsatz::n_free_mu() const {
    return static_cast<int>(std::count(mu_free.begin(), mu_free.end(), true));
}

std::vector<DofEntry> DualAnsatz::dof_map() const {
    std::vector<DofEntry> map;
    for (int i = 0; i < static_cast<int>(lambda_free.size()); ++i) {
        if (lambda_free[i]) map.push_back({Field::lambda, i});
    }
    for (int i = 0; i < static_cast<int>(mu_free.size()); ++i) {
        if (mu_free[i]) map.push_back({Field::mu, i});
    }
    return map;
}

PrimalPair dtp_contribution(const ProblemSpec& spec, Field field, double value, double d_dx,
                            double d_dt) {
    const double alpha = spec.effective_alpha();
    const double kappa = spec.effective_kappa();
    switch (spec.kind) {
        case ProblemKind::ivp_ode:
            if (field == Field::mu) return {};
            return {d_dt + spec.a * value, 0.0};
        case ProblemKind::laplace_1d:
        case ProblemKind::steady_cd:
            if (field == Field::lambda) return {0.0, -alpha * value - kappa * d_dx};
            return {d_dx, value};
        case ProblemKind::transient_cd:
        case ProblemKind::transient_heat:
            if (field == Field::lambda) return {d_dt, -alpha * value - kappa * d_dx};
            return {d_dx, value};
    }
    return {};
}

namespace {

constexpr double kVanishTol = 1e-13;

BasisSet1D make_family(const BasisConfig& cfg, Field field, Interval domain) {
    switch (cfg.family) {
        case BasisFamily::bspline: return BasisSet1D::bspline(cfg.degree, cfg.n, domain);
        case BasisFamily::repu:
            return field == Field::lambda ? BasisSet1D::repu_lambda(cfg.degree, cfg.n, domain)
                                          : BasisSet1D::repu_mu(cfg.degree, cfg.n, domain);
        case BasisFamily::polynomial: return BasisSet1D::polynomials(cfg.polynomials, domain);
    }
    throw ArgumentError("unknown basis family");
}

void require_vanishing(const BasisSet1D& basis, int index, double x) {
    const auto e = basis.evaluate(x);
    for (std::size_t k = 0; k < e.indices.size(); ++k) {
        if (e.indices[k] == index && std::abs(e.values[k]) > kVanishTol) {
            throw ArgumentError("lambda member " + std::to_string(index) +
                                " does not satisfy the homogeneous Dirichlet condition at x = " +
                                std::to_string(x));
        }
    }
}

DualAnsatz build_steady(const ProblemSpec& spec, const BasisConfig& lcfg, const BasisConfig& mcfg) {
    BasisSet1D lam = make_family(lcfg, Field::lambda, {0.0, 1.0});
    BasisSet1D mu = make_family(mcfg, Field::mu, {0.0, 1.0});

    std::vector<bool> lambda_free(lam.n_funcs(), true);
    if (lam.kind() == BasisKind::bspline) {
        // Open knots interpolate the ends: only the first and last member are nonzero there.
        lambda_free.front() = false;
        lambda_free.back() = false;
    } else {
        for (int i = 0; i < lam.n_funcs(); ++i) {
            require_vanishing(lam, i, 0.0);
            require_vanishing(lam, i, 1.0);
        }
    }
    DualAnsatz ans{FieldBasis(std::move(lam), Axis::space), FieldBasis(std::move(mu), Axis::space),
                   std::move(lambda_free), std::vector<bool>(), Eigen::VectorXd(), spec.lambda_lift};
    ans.mu_free.assign(ans.mu_basis->n_funcs(), true);
    ans.lambda_fixed = Eigen::VectorXd::Zero(ans.lambda_basis.n_funcs());
    return ans;
}

DualAnsatz build_transient(const ProblemSpec& spec, const BasisConfig& lcfg,
                           const BasisConfig& mcfg) {
    if (lcfg.family != BasisFamily::bspline || mcfg.family != BasisFamily::bspline) {
        throw ArgumentError("space-time problems need B-spline tensor products");
    }
    const Interval space{0.0, 1.0};
    const Interval time{0.0, spec.T};
    TensorBasis2D lam(BasisSet1D::bspline(lcfg.degree, lcfg.n, space),
                      BasisSet1D::bspline(lcfg.degree, lcfg.n, time));
    TensorBasis2D mu(BasisSet1D::bspline(mcfg.degree, mcfg.n, space),
                     BasisSet1D::bspline(mcfg.degree, mcfg.n, time));

    const bool heat = spec.kind == ProblemKind::transient_heat;
    std::vector<bool> lambda_free(lam.n_funcs(), true);
    const int lx = lam.basis_x().n_funcs();
    const int lt = lam.basis_t().n_funcs();
    for (int i = 0; i < lx; ++i) {
        for (int j = 0; j < lt; ++j) {
            const bool on_left = i == 0;
            const bool on_right = i == lx - 1;
            const bool on_terminal = j == lt - 1;
            if (on_left || on_terminal || (!heat && on_right)) lambda_free[lam.index(i, j)] = false;
        }
    }
    std::vector<bool> mu_free(mu.n_funcs(), true);
    if (heat) {
        const int mx = mu.basis_x().n_funcs();
        for (int j = 0; j < mu.basis_t().n_funcs(); ++j) mu_free[mu.index(mx - 1, j)] = false;
    }
    DualAnsatz ans{FieldBasis(std::move(lam)), FieldBasis(std::move(mu)), std::move(lambda_free),
                   std::move(mu_free), Eigen::VectorXd(), std::nullopt};
    ans.lambda_fixed = Eigen::VectorXd::Zero(ans.lambda_basis.n_funcs());
    return ans;
}

// Cell of the integration mesh; an empty direction collapses to a single point.
struct Cell {
    double x0, x1, t0, t1;
    bool has_x, has_t;
};

struct QuadPoint {
    double x, t, w;
};

std::vector<QuadPoint> cell_points(const Cell& c, const QuadratureRule& rx, const QuadratureRule& rt) {
    const std::vector<QuadPoint1D> px = c.has_x ? map_rule(rx, c.x0, c.x1)
                                                : std::vector<QuadPoint1D>{{0.0, 1.0}};
    const std::vector<QuadPoint1D> pt = c.has_t ? map_rule(rt, c.t0, c.t1)
                                                : std::vector<QuadPoint1D>{{0.0, 1.0}};
    std::vector<QuadPoint> pts;
    pts.reserve(px.size() * pt.size());
    for (const auto& a : px) {
        for (const auto& b : pt) pts.push_back({a.x, b.x, a.w * b.w});
    }
    return pts;
}

struct DofNumbering {
    std::vector<int> lambda;  // basis index -> global dof or -1
    std::vector<int> mu;
    int n_lambda = 0;
    int n_total = 0;
};

DofNumbering number_dofs(const DualAnsatz& ans) {
    DofNumbering num;
    int next = 0;
    num.lambda.assign(ans.lambda_free.size(), -1);
    for (std::size_t i = 0; i < ans.lambda_free.size(); ++i) {
        if (ans.lambda_free[i]) num.lambda[i] = next++;
    }
    num.n_lambda = next;
    num.mu.assign(ans.mu_free.size(), -1);
    for (std::size_t i = 0; i < ans.mu_free.size(); ++i) {
        if (ans.mu_free[i]) num.mu[i] = next++;
    }
    num.n_total = next;
    return num;
}

struct CellContribution {
    std::vector<int> dofs;  // ascending global indices
    Eigen::MatrixXd block;  // upper triangle valid
    Eigen::VectorXd rhs;
    Eigen::MatrixXd factor_rows;  // sqrt(w) U and sqrt(w) Q per point, local columns
};

class CellAssembler {
public:
    CellAssembler(const ProblemSpec& spec, const DualAnsatz& ans, const DofNumbering& num,
                  const QuadratureRule& rx, const QuadratureRule& rt)
        : spec_(spec), ans_(ans), num_(num), rx_(rx), rt_(rt), local_of_(num.n_total, -1) {}

    CellContribution run(const Cell& cell, bool keep_factor) {
        struct Row {
            std::vector<int> dofs;
            std::vector<double> u, q;
            double u_fix = 0.0, q_fix = 0.0, w = 0.0;
        };
        std::vector<Row> rows;
        for (const auto& p : cell_points(cell, rx_, rt_)) {
            Row row;
            row.w = p.w;
            add_field(Field::lambda, ans_.lambda_basis.evaluate(p.x, p.t), row.dofs, row.u, row.q,
                      row.u_fix, row.q_fix);
            if (ans_.mu_basis) {
                add_field(Field::mu, ans_.mu_basis->evaluate(p.x, p.t), row.dofs, row.u, row.q,
                          row.u_fix, row.q_fix);
            }
            if (ans_.lambda_lift) {
                const auto& lift = *ans_.lambda_lift;
                const double dt = lift.d_dt ? lift.d_dt(p.x, p.t) : 0.0;
                const auto c = dtp_contribution(spec_, Field::lambda, lift.value(p.x, p.t),
                                                lift.d_dx(p.x, p.t), dt);
                row.u_fix += c.u;
                row.q_fix += c.q;
            }
            rows.push_back(std::move(row));
        }

        CellContribution out;
        for (const auto& r : rows) out.dofs.insert(out.dofs.end(), r.dofs.begin(), r.dofs.end());
        std::sort(out.dofs.begin(), out.dofs.end());
        out.dofs.erase(std::unique(out.dofs.begin(), out.dofs.end()), out.dofs.end());
        const int m = static_cast<int>(out.dofs.size());
        for (int k = 0; k < m; ++k) local_of_[out.dofs[k]] = k;

        out.block = Eigen::MatrixXd::Zero(m, m);
        out.rhs = Eigen::VectorXd::Zero(m);
        Eigen::VectorXd U(m), Q(m);
        if (keep_factor) out.factor_rows.resize(2 * static_cast<Eigen::Index>(rows.size()), m);
        Eigen::Index next_row = 0;
        for (const auto& r : rows) {
            U.setZero();
            Q.setZero();
            for (std::size_t k = 0; k < r.dofs.size(); ++k) {
                const int l = local_of_[r.dofs[k]];
                U[l] += r.u[k];
                Q[l] += r.q[k];
            }
            out.block.selfadjointView<Eigen::Upper>().rankUpdate(U, r.w);
            out.block.selfadjointView<Eigen::Upper>().rankUpdate(Q, r.w);
            if (r.u_fix != 0.0 || r.q_fix != 0.0) out.rhs -= r.w * (r.u_fix * U + r.q_fix * Q);
            if (keep_factor) {
                const double sw = std::sqrt(r.w);
                out.factor_rows.row(next_row++) = sw * U.transpose();
                out.factor_rows.row(next_row++) = sw * Q.transpose();
            }
        }
        for (int g : out.dofs) local_of_[g] = -1;
        return out;
    }

private:
    void add_field(Field field, const FieldEval& e, std::vector<int>& dofs, std::vector<double>& u,
                   std::vector<double>& q, double& u_fix, double& q_fix) const {
        const auto& map = field == Field::lambda ? num_.lambda : num_.mu;
        for (std::size_t k = 0; k < e.indices.size(); ++k) {
            const int idx = e.indices[k];
            const auto c = dtp_contribution(spec_, field, e.values[k], e.d_dx[k], e.d_dt[k]);
            const int g = map[idx];
            if (g >= 0) {
                dofs.push_back(g);
                u.push_back(c.u);
                q.push_back(c.q);
            } else if (field == Field::lambda && ans_.lambda_fixed[idx] != 0.0) {
                u_fix += ans_.lambda_fixed[idx] * c.u;
                q_fix += ans_.lambda_fixed[idx] * c.q;
            }
        }
    }

    const ProblemSpec& spec_;
    const DualAnsatz& ans_;
    const DofNumbering& num_;
    const QuadratureRule& rx_;
    const QuadratureRule& rt_;
    std::vector<int> local_of_;
};

void scatter(const CellContribution& c, AssembledSystem& sys, Eigen::Index& factor_row) {
    const int m = static_cast<int>(c.dofs.size());
    for (int b = 0; b < m; ++b) {
        for (int a = 0; a <= b; ++a) sys.K(c.dofs[a], c.dofs[b]) += c.block(a, b);
        sys.f[c.dofs[b]] += c.rhs[b];
    }
    if (sys.factor) {
        const Eigen::Index rows = c.factor_rows.rows();
        for (int b = 0; b < m; ++b) {
            sys.factor->block(factor_row, c.dofs[b], rows, 1) = c.factor_rows.col(b);
        }
        factor_row += rows;
    }
}

std::vector<Cell> build_cells(const std::vector<double>& bx, const std::vector<double>& bt) {
    std::vector<Cell> cells;
    const std::size_t nx = bx.empty() ? 1 : bx.size() - 1;
    const std::size_t nt = bt.empty() ? 1 : bt.size() - 1;
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < nt; ++j) {
            Cell c{};
            c.has_x = !bx.empty();
            c.has_t = !bt.empty();
            if (c.has_x) {
                c.x0 = bx[i];
                c.x1 = bx[i + 1];
            }
            if (c.has_t) {
                c.t0 = bt[j];
                c.t1 = bt[j + 1];
            }
            cells.push_back(c);
        }
    }
    return cells;
}

std::vector<double> merged(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() && b.empty()) return {};
    return merge_breakpoints(a, b);
}

// -int u0(x) N_lambda(x, 0) dx with the point count raised until two successive
// counts agree.
void add_initial_load(const ProblemSpec& spec, const DualAnsatz& ans, const DofNumbering& num,
                      int start_count, Eigen::VectorXd& f) {
    const auto bx = ans.lambda_basis.breakpoints_x();
    auto load = [&](int count) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(f.size());
        const auto rule = gauss_legendre_rule(count);
        for (std::size_t s = 0; s + 1 < bx.size(); ++s) {
            for (const auto& qp : map_rule(rule, bx[s], bx[s + 1])) {
                const double u0 = spec.initial(qp.x);
                const auto e = ans.lambda_basis.evaluate(qp.x, 0.0);
                for (std::size_t k = 0; k < e.indices.size(); ++k) {
                    const int g = num.lambda[e.indices[k]];
                    if (g >= 0) v[g] -= qp.w * u0 * e.values[k];
                }
            }
        }
        return v;
    };
    int count = std::min(start_count, kMaxGaussPoints);
    Eigen::VectorXd prev = load(count);
    while (count < kMaxGaussPoints) {
        ++count;
        Eigen::VectorXd next = load(count);
        const double diff = (next - prev).lpNorm<Eigen::Infinity>();
        prev = std::move(next);
        if (diff <= 1e-12 * std::max(1.0, prev.lpNorm<Eigen::Infinity>())) break;
    }
    f += prev;
}

void add_boundary_loads(const ProblemSpec& spec, const DualAnsatz& ans, const DofNumbering& num,
                        Eigen::VectorXd& f) {
    switch (spec.kind) {
        case ProblemKind::ivp_ode: {
            const auto e = ans.lambda_basis.evaluate(0.0, 0.0);
            for (std::size_t k = 0; k < e.indices.size(); ++k) {
                const int g = num.lambda[e.indices[k]];
                if (g >= 0) f[g] -= spec.u0 * e.values[k];
            }
            return;
        }
        case ProblemKind::laplace_1d:
        case ProblemKind::steady_cd: {
            const auto right = ans.mu_basis->evaluate(1.0, 0.0);
            for (std::size_t k = 0; k < right.indices.size(); ++k) {
                const int g = num.mu[right.indices[k]];
                if (g >= 0) f[g] += spec.bc_right * right.values[k];
            }
            const auto left = ans.mu_basis->evaluate(0.0, 0.0);
            for (std::size_t k = 0; k < left.indices.size(); ++k) {
                const int g = num.mu[left.indices[k]];
                if (g >= 0) f[g] -= spec.bc_left * left.values[k];
            }
            return;
        }
        case ProblemKind::transient_cd:
        case ProblemKind::transient_heat: {
            const bool heat = spec.kind == ProblemKind::transient_heat;
            const auto bt = ans.mu_basis->breakpoints_t();
            const auto rule = gauss_legendre_rule(ans.mu_basis->degree_t() + 1);
            for (std::size_t s = 0; s + 1 < bt.size(); ++s) {
                for (const auto& qp : map_rule(rule, bt[s], bt[s + 1])) {
                    if (!heat) {
                        const auto right = ans.mu_basis->evaluate(1.0, qp.x);
                        for (std::size_t k = 0; k < right.indices.size(); ++k) {
                            const int g = num.mu[right.indices[k]];
                            if (g >= 0) f[g] += qp.w * spec.bc_right * right.values[k];
                        }
                    }
                    const auto left = ans.mu_basis->evaluate(0.0, qp.x);
                    for (std::size_t k = 0; k < left.indices.size(); ++k) {
                        const int g = num.mu[left.indices[k]];
                        if (g >= 0) f[g] -= qp.w * spec.bc_left * left.values[k];
                    }
                }
            }
            return;
        }
    }
}

}  // namespace

DualAnsatz build_dual_ansatz(const ProblemSpec& spec, const BasisConfig& lambda_cfg,
                             const BasisConfig& mu_cfg) {
    spec.validate();
    for (const auto* cfg : {&lambda_cfg, &mu_cfg}) {
        if (cfg->family != BasisFamily::polynomial && (cfg->degree < 1 || cfg->n < 1)) {
            throw ArgumentError("basis degree and span count must be >= 1");
        }
    }
    switch (spec.kind) {
        case ProblemKind::ivp_ode:
            return build_ivp_ansatz(spec, make_family(lambda_cfg, Field::mu, {0.0, spec.T}),
                                    spec.lambda_T);
        case ProblemKind::laplace_1d:
        case ProblemKind::steady_cd: return build_steady(spec, lambda_cfg, mu_cfg);
        case ProblemKind::transient_cd:
        case ProblemKind::transient_heat: return build_transient(spec, lambda_cfg, mu_cfg);
    }
    throw ArgumentError("unknown problem kind");
}

DualAnsatz build_ivp_ansatz(const ProblemSpec& spec, const BasisSet1D& lambda_basis,
                            double lambda_T) {
    spec.validate();
    if (spec.kind != ProblemKind::ivp_ode) throw ArgumentError("IVP ansatz needs kind ivp_ode");
    const Interval dom = lambda_basis.domain();
    if (std::abs(dom.lo) > 1e-14 || std::abs(dom.hi - spec.T) > 1e-12 * std::max(1.0, spec.T)) {
        throw ArgumentError("IVP lambda basis must be defined on [0, T]");
    }
    // Exactly one member may be nonzero at T, with value one.
    const auto e = lambda_basis.evaluate(dom.hi);
    int terminal = -1;
    for (std::size_t k = 0; k < e.indices.size(); ++k) {
        if (std::abs(e.values[k]) <= kVanishTol) continue;
        if (terminal >= 0 || std::abs(e.values[k] - 1.0) > kVanishTol) {
            throw ArgumentError("lambda basis cannot interpolate the terminal value at t = T");
        }
        terminal = e.indices[k];
    }
    if (terminal < 0) throw ArgumentError("lambda basis vanishes at t = T");

    DualAnsatz ans{FieldBasis(lambda_basis, Axis::time), std::nullopt,
                   std::vector<bool>(lambda_basis.n_funcs(), true), {}, Eigen::VectorXd(),
                   std::nullopt};
    ans.lambda_free[terminal] = false;
    ans.lambda_fixed = Eigen::VectorXd::Zero(lambda_basis.n_funcs());
    ans.lambda_fixed[terminal] = lambda_T;
    return ans;
}

AssembledSystem assemble(const ProblemSpec& spec, const DualAnsatz& ansatz,
                         const AssemblyOptions& options) {
    spec.validate();
    if (spec.kind != ProblemKind::ivp_ode && !ansatz.mu_basis) {
        throw ArgumentError("ansatz lacks a mu space for this problem kind");
    }
    assert(static_cast<int>(ansatz.lambda_free.size()) == ansatz.lambda_basis.n_funcs());

    const DofNumbering num = number_dofs(ansatz);
    std::vector<double> mu_bx, mu_bt;
    int deg_x = ansatz.lambda_basis.degree_x();
    int deg_t = ansatz.lambda_basis.degree_t();
    if (ansatz.mu_basis) {
        mu_bx = ansatz.mu_basis->breakpoints_x();
        mu_bt = ansatz.mu_basis->breakpoints_t();
        deg_x = std::max(deg_x, ansatz.mu_basis->degree_x());
        deg_t = std::max(deg_t, ansatz.mu_basis->degree_t());
    }
    if (ansatz.lambda_lift) deg_x = std::max(deg_x, ansatz.lambda_lift->degree);
    const auto bx = merged(ansatz.lambda_basis.breakpoints_x(), mu_bx);
    const auto bt = merged(ansatz.lambda_basis.breakpoints_t(), mu_bt);
    const QuadratureRule rx = gauss_legendre_rule(std::min(deg_x + 1, kMaxGaussPoints));
    const QuadratureRule rt = gauss_legendre_rule(std::min(deg_t + 1, kMaxGaussPoints));
    const auto cells = build_cells(bx, bt);

    AssembledSystem sys;
    sys.K = Eigen::MatrixXd::Zero(num.n_total, num.n_total);
    sys.f = Eigen::VectorXd::Zero(num.n_total);
    sys.dof_map = ansatz.dof_map();
    sys.n_lambda_free = num.n_lambda;

    Eigen::Index factor_row = 0;
    if (options.keep_factor) {
        const Eigen::Index per_cell = 2 * static_cast<Eigen::Index>(
            (bx.empty() ? 1 : rx.count()) * (bt.empty() ? 1 : rt.count()));
        sys.factor = Eigen::MatrixXd::Zero(per_cell * static_cast<Eigen::Index>(cells.size()),
                                           num.n_total);
    }

    const int workers = std::clamp(options.workers, 1, static_cast<int>(cells.size()));
    const bool keep = options.keep_factor;
    if (workers == 1) {
        CellAssembler worker(spec, ansatz, num, rx, rt);
        for (const auto& c : cells) scatter(worker.run(c, keep), sys, factor_row);
    } else {
        std::vector<CellContribution> parts(cells.size());
        std::vector<std::thread> pool;
        const std::size_t chunk = (cells.size() + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                CellAssembler worker(spec, ansatz, num, rx, rt);
                const std::size_t lo = w * chunk;
                const std::size_t hi = std::min(cells.size(), lo + chunk);
                for (std::size_t c = lo; c < hi; ++c) parts[c] = worker.run(cells[c], keep);
            });
        }
        for (auto& t : pool) t.join();
        for (const auto& p : parts) scatter(p, sys, factor_row);
    }
    sys.K.triangularView<Eigen::StrictlyLower>() = sys.K.transpose();

    add_boundary_loads(spec, ansatz, num, sys.f);
    if (is_transient(spec.kind)) add_initial_load(spec, ansatz, num, deg_x + 1, sys.f);
    return sys;
}

AssembledSystem assemble_ivp_ode(const ProblemSpec& spec, const BasisSet1D& lambda_basis,
                                 double lambda_T) {
    return assemble(spec, build_ivp_ansatz(spec, lambda_basis, lambda_T));
}

DualCoefficients expand_coefficients(const DualAnsatz& ansatz, const Eigen::VectorXd& d) {
    if (d.size() != ansatz.n_dof()) throw ArgumentError("coefficient vector has the wrong length");
    DualCoefficients c;
    c.lambda = ansatz.lambda_fixed;
    c.mu = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ansatz.mu_free.size()));
    int next = 0;
    for (std::size_t i = 0; i < ansatz.lambda_free.size(); ++i) {
        if (ansatz.lambda_free[i]) c.lambda[static_cast<Eigen::Index>(i)] = d[next++];
    }
    for (std::size_t i = 0; i < ansatz.mu_free.size(); ++i) {
        if (ansatz.mu_free[i]) c.mu[static_cast<Eigen::Index>(i)] = d[next++];
    }
    return c;
}

}  // namespace dualgal
