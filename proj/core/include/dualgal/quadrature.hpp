#pragma once

#include <functional>
#include <span>
#include <vector>

namespace dualgal {

/// Gauss-Legendre nodes and weights on the reference interval [-1, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    int count() const { return static_cast<int>(nodes.size()); }
};

constexpr int kMaxGaussPoints = 32;

QuadratureRule gauss_legendre_rule(int count);

struct QuadPoint1D {
    double x;
    double w;
};

/// Sorted union of two breakpoint lists; values closer than tol collapse.
std::vector<double> merge_breakpoints(std::span<const double> a, std::span<const double> b,
                                      double tol = 1e-12);

/// Mapped Gauss points of one span [lo, hi].
std::vector<QuadPoint1D> map_rule(const QuadratureRule& rule, double lo, double hi);

double integrate_over_spans(std::span<const double> breakpoints, const QuadratureRule& rule,
                            const std::function<double(double)>& integrand);

/// Tensor cells of breakpoints_x by breakpoints_t, product rule on each cell.
/// Cells are visited in x-major order.
double integrate_over_cells(std::span<const double> breakpoints_x,
                            std::span<const double> breakpoints_t, const QuadratureRule& rule,
                            const std::function<double(double, double)>& integrand);

}  // namespace dualgal
