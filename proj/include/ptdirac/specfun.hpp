#pragma once

namespace ptdirac::specfun {

/// Polynomial value and first derivative at one point. alpha/beta are the
/// Jacobi parameters (zero for Hermite).
struct PolyEval {
    int degree = 0;
    double alpha = 0.0;
    double beta = 0.0;
    double value = 0.0;
    double derivative = 0.0;
};

inline constexpr int max_degree = 200;

/// Physicists' Hermite H_n(u) and H_n'(u) = 2n H_{n-1}(u).
PolyEval hermite(int n, double u);

/// Jacobi P_n^{(a,b)}(z) by the three-term recurrence, with
/// d/dz P_n^{(a,b)} = (n+a+b+1)/2 P_{n-1}^{(a+1,b+1)}.
PolyEval jacobi(int n, double a, double b, double z);

/// K_0 or K_1 for z > 0. Power series for z <= bessel_seam, Steed's
/// continued fraction above it.
double bessel_k(int order, double z);

inline constexpr double bessel_seam = 2.0;

// The two branches, exposed so the seam can be tested.
double bessel_k_series(int order, double z);
double bessel_k_cf(int order, double z);

/// K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt by adaptive quadrature.
/// Slow; used as an oracle.
double bessel_k_integral(int order, double z);

/// Tricomi U(a, b, z) for a > 0, z > 0 from
///   U = 1/Gamma(a) int_0^inf e^{-zt} t^{a-1} (1+t)^{b-a-1} dt.
double confluent_u(double a, double b, double z, double rel_tol = 1e-13);

} // namespace ptdirac::specfun
