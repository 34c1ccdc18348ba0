#include "oracles.hpp"

#include <dualgal/assembly.hpp>
#include <dualgal/errors.hpp>
#include <dualgal/problems.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace dualgal;

namespace {

const BasisConfig kLaplaceLambda{BasisFamily::polynomial, 0, 0, {{0, 1, -1}, {0, 0, 1, -1}}};
const BasisConfig kLaplaceMu{BasisFamily::polynomial, 0, 0, {{1}, {0, 1}, {0, 0, 1}}};

// Written in the published dof order (a0, a1, a2, b0, b1), mu first.
Eigen::MatrixXd laplace_reference_matrix() {
    Eigen::MatrixXd K(5, 5);
    K << 1, 1.0 / 2, 1.0 / 3, 0, 0,
         1.0 / 2, 4.0 / 3, 5.0 / 4, 1.0 / 6, 1.0 / 12,
         1.0 / 3, 5.0 / 4, 23.0 / 15, 1.0 / 6, 1.0 / 10,
         0, 1.0 / 6, 1.0 / 6, 1.0 / 3, 1.0 / 6,
         0, 1.0 / 12, 1.0 / 10, 1.0 / 6, 2.0 / 15;
    return K;
}

// The library numbers lambda dofs first; this maps to the mu-first layout.
Eigen::PermutationMatrix<5> mu_first() {
    Eigen::PermutationMatrix<5> P;
    P.indices() << 3, 4, 0, 1, 2;  // library index k goes to position P(k)
    return P;
}

double bspline_value(const std::vector<double>& U, int p, int i, double x) {
    return oracle::cox_de_boor(U, i, p, x);
}

}  // namespace

TEST(DtP, SteadyAndTransientRows) {
    const auto steady = ProblemSpec::steady_cd(3.0, 0.5);
    auto c = dtp_contribution(steady, Field::lambda, 2.0, 5.0, 7.0);
    EXPECT_DOUBLE_EQ(c.u, 0.0);
    EXPECT_DOUBLE_EQ(c.q, -3.0 * 2.0 - 0.5 * 5.0);
    c = dtp_contribution(steady, Field::mu, 2.0, 5.0, 7.0);
    EXPECT_DOUBLE_EQ(c.u, 5.0);
    EXPECT_DOUBLE_EQ(c.q, 2.0);

    const auto laplace = ProblemSpec::laplace(0, 1);
    c = dtp_contribution(laplace, Field::lambda, 2.0, 5.0, 0.0);
    EXPECT_DOUBLE_EQ(c.q, -5.0);

    const auto cd = ProblemSpec::transient_cd(0.5, 3.0, [](double) { return 0.0; });
    c = dtp_contribution(cd, Field::lambda, 2.0, 5.0, 7.0);
    EXPECT_DOUBLE_EQ(c.u, 7.0);
    EXPECT_DOUBLE_EQ(c.q, -3.0 * 2.0 - 0.5 * 5.0);

    const auto heat = ProblemSpec::transient_heat(0.5, [](double) { return 1.0; }, 1.0);
    c = dtp_contribution(heat, Field::lambda, 2.0, 5.0, 7.0);
    EXPECT_DOUBLE_EQ(c.q, -0.5 * 5.0);

    const auto ivp = ProblemSpec::ivp(-2.0, 1.0, 1.0);
    c = dtp_contribution(ivp, Field::lambda, 2.0, 0.0, 7.0);
    EXPECT_DOUBLE_EQ(c.u, 7.0 - 4.0);
}

TEST(Laplace, ExactFiveByFiveSystem) {
    const auto spec = ProblemSpec::laplace(0.0, 1.0);
    const auto ans = build_dual_ansatz(spec, kLaplaceLambda, kLaplaceMu);
    const auto sys = assemble(spec, ans);
    const auto P = mu_first();
    const Eigen::MatrixXd K = P * sys.K * P.transpose();
    const Eigen::VectorXd f = P * sys.f;
    EXPECT_LE((K - laplace_reference_matrix()).cwiseAbs().maxCoeff(), 1e-14);
    Eigen::VectorXd fref(5);
    fref << 1, 1, 1, 0, 0;
    EXPECT_LE((f - fref).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Laplace, LiftedLambdaData) {
    auto spec = ProblemSpec::laplace(0.0, 1.0);
    spec.lambda_lift = LiftField{[](double x, double) { return 1 - 3 * x + x * x + 3 * x * x * x; },
                                 [](double x, double) { return -3 + 2 * x + 9 * x * x; }, nullptr, 3};
    const auto ans = build_dual_ansatz(spec, kLaplaceLambda, kLaplaceMu);
    const auto sys = assemble(spec, ans);
    const auto P = mu_first();
    const Eigen::MatrixXd K = P * sys.K * P.transpose();
    const Eigen::VectorXd f = P * sys.f;
    EXPECT_LE((K - laplace_reference_matrix()).cwiseAbs().maxCoeff(), 1e-14);
    Eigen::VectorXd fref(5);
    fref << 2, 29.0 / 12, 23.0 / 10, 11.0 / 6, 16.0 / 15;
    EXPECT_LE((f - fref).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Masks, SteadyBSplineDropsEndCoefficients) {
    const auto spec = ProblemSpec::steady_cd(50.0, 1.0);
    const auto ans = build_dual_ansatz(spec, {BasisFamily::bspline, 3, 20, {}}, {BasisFamily::bspline, 2, 20, {}});
    ASSERT_EQ(ans.lambda_free.size(), 23u);
    EXPECT_FALSE(ans.lambda_free.front());
    EXPECT_FALSE(ans.lambda_free.back());
    EXPECT_EQ(ans.n_free_lambda(), 21);
    EXPECT_EQ(ans.n_free_mu(), 22);
}

TEST(Masks, RePULambdaIsFullyFree) {
    const auto spec = ProblemSpec::steady_cd(10.0, 1.0);
    const auto ans = build_dual_ansatz(spec, {BasisFamily::repu, 3, 8, {}}, {BasisFamily::repu, 2, 8, {}});
    EXPECT_EQ(ans.n_free_lambda(), 16);
    EXPECT_EQ(ans.n_free_mu(), 16);
}

TEST(Masks, NonVanishingPolynomialLambdaRejected) {
    const auto spec = ProblemSpec::laplace(0.0, 1.0);
    const BasisConfig bad{BasisFamily::polynomial, 0, 0, {{1, 1}}};
    EXPECT_THROW(build_dual_ansatz(spec, bad, kLaplaceMu), ArgumentError);
}

TEST(Masks, TransientConvectionDiffusion) {
    const auto spec = ProblemSpec::transient_cd(0.01, 0.1, [](double x) { return std::sin(2 * std::numbers::pi * x); });
    const auto ans = build_dual_ansatz(spec, {BasisFamily::bspline, 10, 1, {}}, {BasisFamily::bspline, 9, 1, {}});
    EXPECT_EQ(ans.n_free_mu(), 100);
    const auto& tb = ans.lambda_basis.tensor();
    const int nx = tb.basis_x().n_funcs();
    const int nt = tb.basis_t().n_funcs();
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < nt; ++j) {
            const bool masked = i == 0 || i == nx - 1 || j == nt - 1;
            EXPECT_EQ(ans.lambda_free[tb.index(i, j)], !masked) << i << "," << j;
        }
    }
    EXPECT_EQ(ans.n_free_lambda(), 9 * 10);
}

TEST(Masks, TransientHeat) {
    const auto spec = ProblemSpec::transient_heat(1.0, [](double x) { return 1 + std::sin(std::numbers::pi * x / 2); }, 1.0);
    const auto ans = build_dual_ansatz(spec, {BasisFamily::bspline, 6, 1, {}}, {BasisFamily::bspline, 5, 1, {}});
    const auto& lb = ans.lambda_basis.tensor();
    const auto& mb = ans.mu_basis->tensor();
    for (int i = 0; i < lb.basis_x().n_funcs(); ++i) {
        for (int j = 0; j < lb.basis_t().n_funcs(); ++j) {
            const bool masked = i == 0 || j == lb.basis_t().n_funcs() - 1;
            EXPECT_EQ(ans.lambda_free[lb.index(i, j)], !masked);
        }
    }
    for (int i = 0; i < mb.basis_x().n_funcs(); ++i) {
        for (int j = 0; j < mb.basis_t().n_funcs(); ++j) {
            EXPECT_EQ(ans.mu_free[mb.index(i, j)], i != mb.basis_x().n_funcs() - 1);
        }
    }
}

TEST(Masks, TransientNeedsBSplines) {
    const auto spec = ProblemSpec::transient_cd(0.1, 0.1, [](double) { return 0.0; });
    EXPECT_THROW(build_dual_ansatz(spec, {BasisFamily::repu, 2, 2, {}}, {BasisFamily::bspline, 2, 2, {}}),
                 ArgumentError);
}

TEST(Assembly, SteadyMatchesBruteForceOracle) {
    const double alpha = 7.0, kappa = 0.6;
    const int p = 2, q = 3, n = 5;
    const auto spec = ProblemSpec::steady_cd(alpha, kappa, 0.4, 1.3);
    const auto ans = build_dual_ansatz(spec, {BasisFamily::bspline, q, n, {}}, {BasisFamily::bspline, p, n, {}});
    const auto sys = assemble(spec, ans);

    const auto UL = oracle::open_uniform_knots(q, n);
    const auto UM = oracle::open_uniform_knots(p, n);
    const int nl = n + q, nm = n + p;
    // Rows of the DtP map per global dof: lambda interior members then every mu member.
    struct Member {
        bool lambda;
        int i;
    };
    std::vector<Member> dofs;
    for (int i = 1; i < nl - 1; ++i) dofs.push_back({true, i});
    for (int i = 0; i < nm; ++i) dofs.push_back({false, i});
    ASSERT_EQ(static_cast<Eigen::Index>(dofs.size()), sys.K.rows());
    auto U = [&](const Member& m, double x) {
        return m.lambda ? 0.0 : oracle::cox_de_boor_derivative(UM, m.i, p, x);
    };
    auto Q = [&](const Member& m, double x) {
        return m.lambda ? -alpha * bspline_value(UL, q, m.i, x) - kappa * oracle::cox_de_boor_derivative(UL, m.i, q, x)
                        : bspline_value(UM, p, m.i, x);
    };
    for (std::size_t a = 0; a < dofs.size(); ++a) {
        for (std::size_t b = a; b < dofs.size(); ++b) {
            const double ref = oracle::integrate(
                [&](double x) { return U(dofs[a], x) * U(dofs[b], x) + Q(dofs[a], x) * Q(dofs[b], x); },
                0.0, 1.0, 60, 8);
            EXPECT_NEAR(sys.K(a, b), ref, 1e-12 * std::max(1.0, std::abs(ref))) << a << "," << b;
        }
        const auto& m = dofs[a];
        const double fref = m.lambda ? 0.0
                                     : 1.3 * bspline_value(UM, p, m.i, 1.0) - 0.4 * bspline_value(UM, p, m.i, 0.0);
        EXPECT_NEAR(sys.f[a], fref, 1e-14);
    }
}

TEST(Assembly, TransientMatchesBruteForceOracle) {
    const double alpha = 0.5, kappa = 0.3, left = 0.3, right = -0.2;
    const int p = 2, q = 3, n = 2;
    auto u0 = [](double x) { return std::cos(3.0 * x) + x; };
    const auto spec = ProblemSpec::transient_cd(kappa, alpha, u0, left, right);
    const auto ans = build_dual_ansatz(spec, {BasisFamily::bspline, q, n, {}}, {BasisFamily::bspline, p, n, {}});
    const auto sys = assemble(spec, ans);
    const auto dof_map = ans.dof_map();

    const auto UL = oracle::open_uniform_knots(q, n);
    const auto UM = oracle::open_uniform_knots(p, n);
    const auto& lt = ans.lambda_basis.tensor();
    const auto& mt = ans.mu_basis->tensor();
    struct Rows {
        double u, q;
    };
    auto row = [&](const DofEntry& e, double x, double t) -> Rows {
        if (e.field == Field::lambda) {
            const int i = lt.index_x(e.basis_index), j = lt.index_t(e.basis_index);
            const double bx = oracle::cox_de_boor(UL, i, q, x), bt = oracle::cox_de_boor(UL, j, q, t);
            const double dx = oracle::cox_de_boor_derivative(UL, i, q, x);
            const double dt = oracle::cox_de_boor_derivative(UL, j, q, t);
            return {bx * dt, -alpha * bx * bt - kappa * dx * bt};
        }
        const int i = mt.index_x(e.basis_index), j = mt.index_t(e.basis_index);
        return {oracle::cox_de_boor_derivative(UM, i, p, x) * oracle::cox_de_boor(UM, j, p, t),
                oracle::cox_de_boor(UM, i, p, x) * oracle::cox_de_boor(UM, j, p, t)};
    };
    for (std::size_t a = 0; a < dof_map.size(); a += 3) {
        for (std::size_t b = a; b < dof_map.size(); b += 2) {
            const double ref = oracle::integrate_2d(
                [&](double x, double t) {
                    const auto ra = row(dof_map[a], x, t), rb = row(dof_map[b], x, t);
                    return ra.u * rb.u + ra.q * rb.q;
                },
                4, 8);
            EXPECT_NEAR(sys.K(a, b), ref, 1e-12 * std::max(1.0, std::abs(ref))) << a << "," << b;
        }
    }
    for (std::size_t a = 0; a < dof_map.size(); ++a) {
        const auto& e = dof_map[a];
        double fref = 0.0;
        if (e.field == Field::lambda) {
            const int i = lt.index_x(e.basis_index), j = lt.index_t(e.basis_index);
            fref = -oracle::integrate([&](double x) { return u0(x) * oracle::cox_de_boor(UL, i, q, x); }, 0, 1) *
                   oracle::cox_de_boor(UL, j, q, 0.0);
        } else {
            const int i = mt.index_x(e.basis_index), j = mt.index_t(e.basis_index);
            const double tint = oracle::integrate([&](double t) { return oracle::cox_de_boor(UM, j, p, t); }, 0, 1);
            fref = (right * oracle::cox_de_boor(UM, i, p, 1.0) - left * oracle::cox_de_boor(UM, i, p, 0.0)) * tint;
        }
        EXPECT_NEAR(sys.f[a], fref, 1e-12) << a;
    }
}

TEST(Assembly, HomogeneousTransientHasZeroLoad) {
    const auto spec = ProblemSpec::transient_cd(0.0, 0.0, [](double) { return 0.0; });
    const auto solved = solve_problem(spec, {BasisFamily::bspline, 3, 2, {}}, {BasisFamily::bspline, 2, 2, {}});
    EXPECT_EQ(solved.system.f.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(solved.report.d.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Assembly, SymmetricAndWorkerInvariant) {
    const auto spec = ProblemSpec::transient_heat(1.0, [](double x) { return 1 + std::sin(std::numbers::pi * x / 2); }, 1.0);
    const auto ans = build_dual_ansatz(spec, {BasisFamily::bspline, 3, 4, {}}, {BasisFamily::bspline, 2, 4, {}});
    const auto one = assemble(spec, ans, {1, false});
    const auto many = assemble(spec, ans, {3, false});
    EXPECT_EQ((one.K - one.K.transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_TRUE(one.K == many.K);
    EXPECT_TRUE(one.f == many.f);
}

TEST(Assembly, FactorReproducesStiffness) {
    const auto spec = ProblemSpec::steady_cd(10.0, 1.0);
    const auto ans = build_dual_ansatz(spec, {BasisFamily::repu, 3, 6, {}}, {BasisFamily::repu, 2, 6, {}});
    const auto sys = assemble(spec, ans, {1, true});
    ASSERT_TRUE(sys.factor.has_value());
    const Eigen::MatrixXd AtA = sys.factor->transpose() * *sys.factor;
    EXPECT_LE((AtA - sys.K).cwiseAbs().maxCoeff(), 1e-12 * sys.K.cwiseAbs().maxCoeff());
}

TEST(Assembly, QuadraticFormIsPrimalEnergy) {
    auto gen = oracle::rng(5);
    const auto spec = ProblemSpec::steady_cd(4.0, 1.0);
    const auto ans = build_dual_ansatz(spec, {BasisFamily::bspline, 4, 6, {}}, {BasisFamily::bspline, 3, 6, {}});
    const auto sys = assemble(spec, ans);
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::VectorXd d = oracle::random_matrix(gen, static_cast<int>(sys.K.rows()), 1).col(0);
        const PrimalSolution sol(spec, ans, d);
        const double energy = oracle::integrate(
            [&](double x) {
                const auto p = sol.evaluate(x, 0.0);
                return p.u * p.u + p.q * p.q;
            },
            0.0, 1.0, 60, 10);
        EXPECT_NEAR(d.dot(sys.K * d), energy, 1e-10 * std::max(1.0, energy));
    }
}

TEST(Ivp, StiffnessAndLoadMatchIntegratedByPartsForm) {
    const double a = -1.3, u0 = 0.7, T = 1.5;
    const int p = 3, n = 4;
    for (double lambda_T : {0.0, 2.0}) {
        const auto spec = ProblemSpec::ivp(a, u0, T, lambda_T);
        const auto basis = BasisSet1D::bspline(p, n, {0.0, T});
        const auto sys = assemble_ivp_ode(spec, basis, lambda_T);
        const auto U = oracle::open_uniform_knots(p, n, 0.0, T);
        const int last = n + p - 1;
        ASSERT_EQ(sys.K.rows(), last);
        auto phi = [&](int i, double t) { return oracle::cox_de_boor(U, i, p, t); };
        auto dphi = [&](int i, double t) { return oracle::cox_de_boor_derivative(U, i, p, t); };
        for (int i = 0; i < last; ++i) {
            for (int j = 0; j < last; ++j) {
                const double ref =
                    oracle::integrate([&](double t) { return dphi(i, t) * dphi(j, t) + a * a * phi(i, t) * phi(j, t); }, 0.0, T) -
                    a * phi(i, 0.0) * phi(j, 0.0);
                EXPECT_NEAR(sys.K(i, j), ref, 1e-12);
            }
            const double lift = oracle::integrate(
                [&](double t) { return (dphi(i, t) + a * phi(i, t)) * (dphi(last, t) + a * phi(last, t)); }, 0.0, T);
            EXPECT_NEAR(sys.f[i], -u0 * phi(i, 0.0) - lambda_T * lift, 1e-12);
        }
    }
}

TEST(Ivp, NonInterpolatingBasisRejected) {
    const auto spec = ProblemSpec::ivp(-1.0, 1.0, 1.0);
    EXPECT_THROW(assemble_ivp_ode(spec, BasisSet1D::repu_mu(2, 3), 0.0), ArgumentError);
    EXPECT_THROW(assemble_ivp_ode(spec, BasisSet1D::bspline(2, 3, {0.0, 2.0}), 0.0), ArgumentError);
}
