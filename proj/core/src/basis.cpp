#include "dualgal/basis.hpp"

#include "dualgal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dualgal {

namespace {

void check_domain(Interval domain, double x, const char* who) {
    if (!(x >= domain.lo && x <= domain.hi)) {
        throw DomainError(std::string(who) + ": point " + std::to_string(x) +
                          " outside [" + std::to_string(domain.lo) + ", " +
                          std::to_string(domain.hi) + "]");
    }
}

void check_interval(Interval domain) {
    if (!(domain.hi > domain.lo) || !std::isfinite(domain.lo) || !std::isfinite(domain.hi)) {
        throw ArgumentError("basis domain must be a finite interval with lo < hi");
    }
}

std::vector<double> uniform_sites(int n, Interval domain) {
    std::vector<double> sites(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        sites[k] = domain.lo + domain.length() * static_cast<double>(k) / n;
    }
    sites.front() = domain.lo;
    sites.back() = domain.hi;
    return sites;
}

// Non-vanishing B-splines of the given degree on knot span `span` (Cox-de Boor
// triangle). Returns degree+1 values for functions span-degree .. span.
void bspline_values(const std::vector<double>& U, int span, int degree, double x,
                    std::vector<double>& out) {
    out.assign(static_cast<std::size_t>(degree) + 1, 0.0);
    std::vector<double> left(static_cast<std::size_t>(degree) + 1);
    std::vector<double> right(static_cast<std::size_t>(degree) + 1);
    out[0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
        left[j] = x - U[span + 1 - j];
        right[j] = U[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double temp = out[r] / (right[r + 1] + left[j - r]);
            out[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        out[j] = saved;
    }
}

}  // namespace

std::vector<double> KnotVector::breakpoints() const {
    std::vector<double> out;
    for (double k : knots) {
        if (out.empty() || k > out.back()) out.push_back(k);
    }
    return out;
}

KnotVector make_open_knot_vector(int degree, int n, Interval domain) {
    if (degree < 1) throw ArgumentError("knot vector degree must be >= 1");
    if (n < 1) throw ArgumentError("knot vector needs n >= 1 spans");
    check_interval(domain);

    KnotVector kv;
    kv.degree = degree;
    kv.n_spans = n;
    kv.knots.reserve(static_cast<std::size_t>(n + 2 * degree + 1));
    kv.knots.insert(kv.knots.end(), static_cast<std::size_t>(degree) + 1, domain.lo);
    const auto sites = uniform_sites(n, domain);
    for (int k = 1; k < n; ++k) kv.knots.push_back(sites[k]);
    kv.knots.insert(kv.knots.end(), static_cast<std::size_t>(degree) + 1, domain.hi);
    return kv;
}

double repu(double z, int p) {
    return z > 0.0 ? std::pow(z, p) : 0.0;
}

double repu_derivative(double z, int p) {
    if (z <= 0.0) return 0.0;
    return p == 1 ? 1.0 : p * std::pow(z, p - 1);
}

BasisSet1D BasisSet1D::bspline(int degree, int n, Interval domain) {
    BasisSet1D b;
    b.kind_ = BasisKind::bspline;
    b.knots_ = make_open_knot_vector(degree, n, domain);
    b.degree_ = degree;
    b.n_funcs_ = n + degree;
    b.domain_ = domain;
    b.sites_ = b.knots_.breakpoints();
    return b;
}

BasisSet1D BasisSet1D::repu_mu(int degree, int n, Interval domain) {
    if (degree < 1) throw ArgumentError("RePU degree must be >= 1");
    if (n < 1) throw ArgumentError("RePU family needs n >= 1 spans");
    check_interval(domain);
    BasisSet1D b;
    b.kind_ = BasisKind::repu_mu;
    b.degree_ = degree;
    b.n_funcs_ = 2 * n;
    b.domain_ = domain;
    b.sites_ = uniform_sites(n, domain);
    return b;
}

BasisSet1D BasisSet1D::repu_lambda(int degree, int n, Interval domain) {
    BasisSet1D b = repu_mu(degree, n, domain);
    b.kind_ = BasisKind::repu_lambda;
    return b;
}

BasisSet1D BasisSet1D::polynomials(std::vector<std::vector<double>> coefficients,
                                   Interval domain) {
    if (coefficients.empty()) throw ArgumentError("polynomial family is empty");
    check_interval(domain);
    BasisSet1D b;
    b.kind_ = BasisKind::polynomial;
    b.degree_ = 0;
    for (auto& c : coefficients) {
        while (c.size() > 1 && c.back() == 0.0) c.pop_back();
        if (c.empty()) c.push_back(0.0);
        b.degree_ = std::max(b.degree_, static_cast<int>(c.size()) - 1);
    }
    b.n_funcs_ = static_cast<int>(coefficients.size());
    b.domain_ = domain;
    b.sites_ = {domain.lo, domain.hi};
    b.poly_coeffs_ = std::move(coefficients);
    return b;
}

int BasisSet1D::polynomial_degree() const {
    // The barycentric blend raises the RePU lambda family by one degree.
    return kind_ == BasisKind::repu_lambda ? degree_ + 1 : degree_;
}

BasisEval1D BasisSet1D::evaluate(double x) const {
    switch (kind_) {
        case BasisKind::bspline: return eval_bspline(x);
        case BasisKind::repu_mu:
        case BasisKind::repu_lambda: return eval_repu(x);
        case BasisKind::polynomial: return eval_polynomials(x);
    }
    return {};
}

BasisEval1D BasisSet1D::eval_bspline(double x) const {
    check_domain(domain_, x, "B-spline evaluation");
    const auto& U = knots_.knots;
    const int p = degree_;
    // Right-continuous span search; x == hi falls into the last nonempty span.
    int span = static_cast<int>(std::upper_bound(U.begin(), U.end(), x) - U.begin()) - 1;
    span = std::clamp(span, p, n_funcs_ - 1);

    BasisEval1D out;
    bspline_values(U, span, p, x, out.values);
    out.indices.resize(static_cast<std::size_t>(p) + 1);
    for (int k = 0; k <= p; ++k) out.indices[k] = span - p + k;

    // N'_{i,p} = p N_{i,p-1} / (u_{i+p} - u_i) - p N_{i+1,p-1} / (u_{i+p+1} - u_{i+1})
    std::vector<double> lower;
    bspline_values(U, span, p - 1, x, lower);  // functions span-p+1 .. span
    out.derivatives.assign(static_cast<std::size_t>(p) + 1, 0.0);
    for (int k = 0; k <= p; ++k) {
        const int i = span - p + k;
        double d = 0.0;
        if (k >= 1) {
            const double den = U[i + p] - U[i];
            if (den > 0.0) d += lower[k - 1] / den;
        }
        if (k <= p - 1) {
            const double den = U[i + p + 1] - U[i + 1];
            if (den > 0.0) d -= lower[k] / den;
        }
        out.derivatives[k] = p * d;
    }
    return out;
}

BasisEval1D BasisSet1D::eval_repu(double x) const {
    check_domain(domain_, x, "RePU evaluation");
    const int n = n_funcs_ / 2;
    const int p = degree_;
    BasisEval1D out;
    out.indices.resize(n_funcs_);
    out.values.resize(n_funcs_);
    out.derivatives.resize(n_funcs_);
    for (int k = 0; k < n_funcs_; ++k) out.indices[k] = k;

    for (int i = 0; i < n; ++i) {
        out.values[i] = repu(x - sites_[i], p);
        out.derivatives[i] = repu_derivative(x - sites_[i], p);
    }
    for (int i = 1; i <= n; ++i) {
        out.values[n + i - 1] = repu(sites_[i] - x, p);
        out.derivatives[n + i - 1] = -repu_derivative(sites_[i] - x, p);
    }

    if (kind_ == BasisKind::repu_lambda) {
        const double h = domain_.length();
        const double w_left = (domain_.hi - x) / h;
        const double w_right = (x - domain_.lo) / h;
        for (int k = 0; k < n; ++k) {
            const double v = out.values[k];
            out.values[k] = w_left * v;
            out.derivatives[k] = w_left * out.derivatives[k] - v / h;
        }
        for (int k = n; k < 2 * n; ++k) {
            const double v = out.values[k];
            out.values[k] = w_right * v;
            out.derivatives[k] = w_right * out.derivatives[k] + v / h;
        }
    }
    return out;
}

BasisEval1D BasisSet1D::eval_polynomials(double x) const {
    check_domain(domain_, x, "polynomial evaluation");
    BasisEval1D out;
    out.indices.resize(n_funcs_);
    out.values.resize(n_funcs_);
    out.derivatives.resize(n_funcs_);
    for (int k = 0; k < n_funcs_; ++k) {
        const auto& c = poly_coeffs_[k];
        double v = 0.0;
        double d = 0.0;
        for (std::size_t m = c.size(); m-- > 0;) {
            d = d * x + v;
            v = v * x + c[m];
        }
        out.indices[k] = k;
        out.values[k] = v;
        out.derivatives[k] = d;
    }
    return out;
}

BasisEval1D eval_bspline_1d(const BasisSet1D& basis, double x) {
    if (basis.kind() != BasisKind::bspline) throw ArgumentError("eval_bspline_1d needs a B-spline basis");
    return basis.eval_bspline(x);
}

BasisEval1D eval_repu_family(const BasisSet1D& basis, double x) {
    if (basis.kind() != BasisKind::repu_mu && basis.kind() != BasisKind::repu_lambda) {
        throw ArgumentError("eval_repu_family needs a RePU basis");
    }
    return basis.eval_repu(x);
}

TensorBasis2D::TensorBasis2D(BasisSet1D basis_x, BasisSet1D basis_t)
    : basis_x_(std::move(basis_x)), basis_t_(std::move(basis_t)) {}

TensorEval2D eval_tensor_2d(const TensorBasis2D& basis, double x, double t) {
    const auto ex = basis.basis_x().evaluate(x);
    const auto et = basis.basis_t().evaluate(t);
    TensorEval2D out;
    const std::size_t count = ex.indices.size() * et.indices.size();
    out.indices.reserve(count);
    out.values.reserve(count);
    out.d_dx.reserve(count);
    out.d_dt.reserve(count);
    for (std::size_t a = 0; a < ex.indices.size(); ++a) {
        for (std::size_t b = 0; b < et.indices.size(); ++b) {
            out.indices.push_back(basis.index(ex.indices[a], et.indices[b]));
            out.values.push_back(ex.values[a] * et.values[b]);
            out.d_dx.push_back(ex.derivatives[a] * et.values[b]);
            out.d_dt.push_back(ex.values[a] * et.derivatives[b]);
        }
    }
    return out;
}

}  // namespace dualgal
