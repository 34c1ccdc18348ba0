#pragma once

#include "dualgal/basis.hpp"
#include "dualgal/problem_spec.hpp"

#include <Eigen/Dense>

#include <optional>
#include <variant>
#include <vector>

namespace dualgal {

enum class BasisFamily { bspline, repu, polynomial };

struct BasisConfig {
    BasisFamily family = BasisFamily::bspline;
    int degree = 1;
    int n = 1;
    /// Monomial coefficients per member, family == polynomial only.
    std::vector<std::vector<double>> polynomials;
};

enum class Axis { space, time };

struct FieldEval {
    std::vector<int> indices;
    std::vector<double> values;
    std::vector<double> d_dx;
    std::vector<double> d_dt;
};

/// Discrete space of one dual field: a univariate family along one axis, or a
/// space-time tensor product.
class FieldBasis {
public:
    FieldBasis(BasisSet1D basis, Axis axis);
    explicit FieldBasis(TensorBasis2D basis);

    bool is_tensor() const { return std::holds_alternative<TensorBasis2D>(basis_); }
    Axis axis() const { return axis_; }
    int n_funcs() const;
    const BasisSet1D& univariate() const;
    const TensorBasis2D& tensor() const;

    /// Breakpoints along x (empty for a time-only family) and along t
    /// (empty for a space-only family).
    std::vector<double> breakpoints_x() const;
    std::vector<double> breakpoints_t() const;
    int degree_x() const;
    int degree_t() const;

    /// Coordinates not carried by the family are ignored.
    FieldEval evaluate(double x, double t) const;

private:
    std::variant<BasisSet1D, TensorBasis2D> basis_;
    Axis axis_ = Axis::space;
};

enum class Field { lambda, mu };

struct DofEntry {
    Field field;
    int basis_index;
};

/// Paired lambda/mu spaces with the masks that encode the Dirichlet conditions
/// of the admissible dual sets. Constrained lambda coefficients keep a fixed
/// value (nonzero only for the IVP terminal condition).
struct DualAnsatz {
    FieldBasis lambda_basis;
    std::optional<FieldBasis> mu_basis;
    std::vector<bool> lambda_free;
    std::vector<bool> mu_free;
    Eigen::VectorXd lambda_fixed;
    std::optional<LiftField> lambda_lift;

    int n_free_lambda() const;
    int n_free_mu() const;
    int n_dof() const { return n_free_lambda() + n_free_mu(); }
    std::vector<DofEntry> dof_map() const;
};

struct AssembledSystem {
    Eigen::MatrixXd K;
    Eigen::VectorXd f;
    std::vector<DofEntry> dof_map;
    int n_lambda_free = 0;
    /// Optional weighted DtP row matrix A with K = A^T A (rows sqrt(w) U and
    /// sqrt(w) Q per quadrature point). Lets the solver work with singular
    /// values of A rather than their squares.
    std::optional<Eigen::MatrixXd> factor;
};

struct AssemblyOptions {
    /// Cells are split across this many threads; results do not depend on it.
    int workers = 1;
    bool keep_factor = false;
};

/// Contribution of one dual basis function (value and first partials) to the
/// primal pair (u_H, q_H) through the DtP map of spec.kind.
struct PrimalPair {
    double u = 0.0;
    double q = 0.0;
};
PrimalPair dtp_contribution(const ProblemSpec& spec, Field field, double value, double d_dx,
                            double d_dt);

/// Transient kinds need B-spline configurations (tensor products in x and t);
/// the steady kinds accept B-splines, RePU frames or explicit polynomials.
DualAnsatz build_dual_ansatz(const ProblemSpec& spec, const BasisConfig& lambda_cfg,
                             const BasisConfig& mu_cfg);

/// lambda lives on [0, T]; the member that interpolates t = T carries lambda_T.
DualAnsatz build_ivp_ansatz(const ProblemSpec& spec, const BasisSet1D& lambda_basis,
                            double lambda_T);

/// K = sum over quadrature points of w (U U^T + Q Q^T), where (U, Q) are the DtP
/// rows of the free dofs; the force vector collects the boundary and initial
/// data and subtracts the action of fixed or lifted lambda.
AssembledSystem assemble(const ProblemSpec& spec, const DualAnsatz& ansatz,
                         const AssemblyOptions& options = {});

AssembledSystem assemble_ivp_ode(const ProblemSpec& spec, const BasisSet1D& lambda_basis,
                                 double lambda_T);

struct DualCoefficients {
    Eigen::VectorXd lambda;
    Eigen::VectorXd mu;
};

/// Full coefficient vectors from the free dofs d, fixed values filled in.
DualCoefficients expand_coefficients(const DualAnsatz& ansatz, const Eigen::VectorXd& d);

}  // namespace dualgal
