#pragma once

#include <functional>
#include <span>

namespace ptdirac::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
    int intervals = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration on [a, b]. The
/// interval with the largest error estimate is bisected until the summed
/// estimate drops below max(abs_tol, rel_tol |I|).
Result adaptive(const std::function<double(double)>& f, double a, double b,
                double rel_tol = 1e-13, double abs_tol = 0.0, int max_intervals = 4000);

/// Integral over [a, inf) through x = a + t/(1 - t).
Result adaptive_to_infinity(const std::function<double(double)>& f, double a,
                            double rel_tol = 1e-13, double abs_tol = 0.0, int max_intervals = 4000);

/// Composite Simpson rule on uniformly spaced samples. An odd number of
/// intervals is closed with a 3/8 panel at the right end.
double simpson(std::span<const double> f, double h);

} // namespace ptdirac::quad
