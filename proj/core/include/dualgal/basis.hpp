#pragma once

#include <vector>

namespace dualgal {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double length() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Open uniform knot vector: end knots repeated degree+1 times, uniform interior sites.
struct KnotVector {
    int degree = 0;
    std::vector<double> knots;
    int n_spans = 0;

    Interval domain() const { return {knots.front(), knots.back()}; }
    /// Distinct knot values x_0 < x_1 < ... < x_n.
    std::vector<double> breakpoints() const;
};

KnotVector make_open_knot_vector(int degree, int n, Interval domain = {});

enum class BasisKind { bspline, repu_mu, repu_lambda, polynomial };

/// Sparse evaluation of a univariate family at one point: only the listed
/// indices may be nonzero.
struct BasisEval1D {
    std::vector<int> indices;
    std::vector<double> values;
    std::vector<double> derivatives;
};

/// Rectified power unit max(0, z)^p and its derivative.
double repu(double z, int p);
double repu_derivative(double z, int p);

/// A family of univariate functions on an interval: B-splines on an open
/// uniform knot vector, the two fixed-weight RePU families, or an explicit
/// list of polynomials given by monomial coefficients.
///
/// RePU families with n spans have 2n members. The mu family is
/// sigma(x - x_i; p) for i = 0..n-1 followed by sigma(x_i - x; p) for i = 1..n.
/// The lambda family blends the same two blocks with the barycentric weights
/// (1 - s) and s, s = (x - lo) / (hi - lo), so every member vanishes at both
/// ends of the interval.
class BasisSet1D {
public:
    static BasisSet1D bspline(int degree, int n, Interval domain = {});
    static BasisSet1D repu_mu(int degree, int n, Interval domain = {});
    static BasisSet1D repu_lambda(int degree, int n, Interval domain = {});
    /// coefficients[k] holds c_0, c_1, ... of member k in powers of x.
    static BasisSet1D polynomials(std::vector<std::vector<double>> coefficients,
                                  Interval domain = {});

    BasisKind kind() const { return kind_; }
    int degree() const { return degree_; }
    int n_funcs() const { return n_funcs_; }
    Interval domain() const { return domain_; }
    /// Breakpoints x_0 < ... < x_n across which members lose smoothness.
    const std::vector<double>& sites() const { return sites_; }
    /// Only meaningful for kind() == bspline.
    const KnotVector& knots() const { return knots_; }
    /// Highest polynomial degree of any member on a single cell.
    int polynomial_degree() const;

    BasisEval1D evaluate(double x) const;

private:
    BasisSet1D() = default;

    BasisEval1D eval_bspline(double x) const;
    BasisEval1D eval_repu(double x) const;
    BasisEval1D eval_polynomials(double x) const;

    friend BasisEval1D eval_bspline_1d(const BasisSet1D&, double);
    friend BasisEval1D eval_repu_family(const BasisSet1D&, double);

    BasisKind kind_ = BasisKind::bspline;
    int degree_ = 0;
    int n_funcs_ = 0;
    Interval domain_;
    std::vector<double> sites_;
    KnotVector knots_;
    std::vector<std::vector<double>> poly_coeffs_;
};

/// The degree+1 B-splines that are nonzero at x. Right-continuous at interior
/// knots; the last span is used at the right end.
BasisEval1D eval_bspline_1d(const BasisSet1D& basis, double x);

/// Every member of a RePU family at x (dense: indices 0..2n-1).
BasisEval1D eval_repu_family(const BasisSet1D& basis, double x);

struct TensorEval2D {
    std::vector<int> indices;
    std::vector<double> values;
    std::vector<double> d_dx;
    std::vector<double> d_dt;
};

/// Tensor product of a spatial and a temporal family. Member (i, j) is
/// basis_x[i](x) * basis_t[j](t) with flat index i * basis_t.n_funcs() + j.
class TensorBasis2D {
public:
    TensorBasis2D(BasisSet1D basis_x, BasisSet1D basis_t);

    const BasisSet1D& basis_x() const { return basis_x_; }
    const BasisSet1D& basis_t() const { return basis_t_; }
    int n_funcs() const { return basis_x_.n_funcs() * basis_t_.n_funcs(); }
    int index(int i, int j) const { return i * basis_t_.n_funcs() + j; }
    int index_x(int flat) const { return flat / basis_t_.n_funcs(); }
    int index_t(int flat) const { return flat % basis_t_.n_funcs(); }

private:
    BasisSet1D basis_x_;
    BasisSet1D basis_t_;
};

TensorEval2D eval_tensor_2d(const TensorBasis2D& basis, double x, double t);

}  // namespace dualgal
