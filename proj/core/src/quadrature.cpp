#include "dualgal/quadrature.hpp"

#include "dualgal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dualgal {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
    double p0 = 1.0;
    double p1 = x;
    if (n == 0) {
        p = 1.0;
        dp = 0.0;
        return;
    }
    for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
}

void check_breakpoints(std::span<const double> breaks) {
    if (breaks.size() < 2) throw ArgumentError("breakpoint list needs at least two entries");
    for (std::size_t k = 1; k < breaks.size(); ++k) {
        if (!(breaks[k] > breaks[k - 1])) throw ArgumentError("breakpoints must be strictly increasing");
    }
}

}  // namespace

QuadratureRule gauss_legendre_rule(int count) {
    if (count < 1 || count > kMaxGaussPoints) {
        throw ArgumentError("Gauss-Legendre point count must lie in [1, 32]");
    }
    QuadratureRule rule;
    rule.nodes.resize(count);
    rule.weights.resize(count);
    if (count == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = 2.0;
        return rule;
    }
    const int half = (count + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
        double p = 0.0;
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            legendre(count, x, p, dp);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) <= 1e-15) break;
        }
        legendre(count, x, p, dp);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[count - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[count - 1 - i] = w;
    }
    if (count % 2 == 1) rule.nodes[count / 2] = 0.0;
    return rule;
}

std::vector<double> merge_breakpoints(std::span<const double> a, std::span<const double> b,
                                      double tol) {
    std::vector<double> all(a.begin(), a.end());
    all.insert(all.end(), b.begin(), b.end());
    if (all.empty()) throw ArgumentError("cannot merge empty breakpoint lists");
    std::sort(all.begin(), all.end());
    std::vector<double> out;
    for (double v : all) {
        if (out.empty() || v - out.back() > tol) out.push_back(v);
    }
    return out;
}

std::vector<QuadPoint1D> map_rule(const QuadratureRule& rule, double lo, double hi) {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    std::vector<QuadPoint1D> pts(rule.nodes.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
        pts[k] = {mid + half * rule.nodes[k], half * rule.weights[k]};
    }
    return pts;
}

double integrate_over_spans(std::span<const double> breakpoints, const QuadratureRule& rule,
                            const std::function<double(double)>& integrand) {
    check_breakpoints(breakpoints);
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < breakpoints.size(); ++s) {
        double cell = 0.0;
        for (const auto& qp : map_rule(rule, breakpoints[s], breakpoints[s + 1])) {
            cell += qp.w * integrand(qp.x);
        }
        total += cell;
    }
    return total;
}

double integrate_over_cells(std::span<const double> breakpoints_x,
                            std::span<const double> breakpoints_t, const QuadratureRule& rule,
                            const std::function<double(double, double)>& integrand) {
    check_breakpoints(breakpoints_x);
    check_breakpoints(breakpoints_t);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints_x.size(); ++i) {
        const auto px = map_rule(rule, breakpoints_x[i], breakpoints_x[i + 1]);
        for (std::size_t j = 0; j + 1 < breakpoints_t.size(); ++j) {
            const auto pt = map_rule(rule, breakpoints_t[j], breakpoints_t[j + 1]);
            double cell = 0.0;
            for (const auto& qx : px) {
                for (const auto& qt : pt) cell += qx.w * qt.w * integrand(qx.x, qt.x);
            }
            total += cell;
        }
    }
    return total;
}

}  // namespace dualgal
