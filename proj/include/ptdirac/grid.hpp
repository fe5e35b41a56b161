#pragma once

#include <complex>
#include <span>
#include <vector>

namespace ptdirac {

using cplx = std::complex<double>;

/// Uniform real grid with N >= 8 points, both ends included.
struct GridSpec {
    double x_min = -1.0;
    double x_max = 1.0;
    int n = 8;

    static GridSpec uniform(double x_min, double x_max, int n);
    static GridSpec symmetric(double half_width, int n);

    double h() const noexcept { return (x_max - x_min) / (n - 1); }
    double x(int i) const noexcept { return x_min + i * h(); }
    bool is_symmetric(double tol = 1e-12) const noexcept;
    std::vector<double> points() const;

    /// Same interval with the spacing halved (n -> 2n - 1).
    GridSpec refined() const { return uniform(x_min, x_max, 2 * n - 1); }

    /// Index of the node at x, or -1 when x is not a node.
    int node_index(double x, double rel_tol = 1e-9) const noexcept;

    void validate() const;
};

// Finite differences on a uniform grid: centered in the interior, one-sided
// second-order stencils at the two ends.
std::vector<cplx> derivative(std::span<const cplx> f, double h);
std::vector<cplx> second_derivative(std::span<const cplx> f, double h);

} // namespace ptdirac
