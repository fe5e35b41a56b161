#include "ptdirac/grid.hpp"

#include <cmath>
#include <string>

#include "ptdirac/errors.hpp"

namespace ptdirac {

GridSpec GridSpec::uniform(double x_min, double x_max, int n)
{
    GridSpec g{x_min, x_max, n};
    g.validate();
    return g;
}

GridSpec GridSpec::symmetric(double half_width, int n)
{
    return uniform(-half_width, half_width, n);
}

void GridSpec::validate() const
{
    if (!(std::isfinite(x_min) && std::isfinite(x_max)) || !(x_min < x_max))
        throw DomainError("grid: need finite x_min < x_max");
    if (n < 8)
        throw DomainError("grid: need at least 8 points, got " + std::to_string(n));
}

bool GridSpec::is_symmetric(double tol) const noexcept
{
    return std::abs(x_min + x_max) <= tol * std::max(1.0, std::abs(x_max));
}

std::vector<double> GridSpec::points() const
{
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i)
        xs[i] = x(i);
    return xs;
}

int GridSpec::node_index(double xq, double rel_tol) const noexcept
{
    const double s = (xq - x_min) / h();
    const double r = std::round(s);
    if (r < 0 || r > n - 1 || std::abs(s - r) > rel_tol * std::max(1.0, std::abs(s)))
        return -1;
    return static_cast<int>(r);
}

std::vector<cplx> derivative(std::span<const cplx> f, double h)
{
    const std::size_t n = f.size();
    std::vector<cplx> d(n);
    if (n < 3)
        throw DomainError("derivative: need at least 3 samples");
    for (std::size_t i = 1; i + 1 < n; ++i)
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
}

std::vector<cplx> second_derivative(std::span<const cplx> f, double h)
{
    const std::size_t n = f.size();
    if (n < 4)
        throw DomainError("second_derivative: need at least 4 samples");
    std::vector<cplx> d(n);
    const double h2 = h * h;
    for (std::size_t i = 1; i + 1 < n; ++i)
        d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    return d;
}

} // namespace ptdirac
