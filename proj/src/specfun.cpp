#include "ptdirac/specfun.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ptdirac/errors.hpp"
#include "ptdirac/quadrature.hpp"

namespace ptdirac::specfun {

namespace {

constexpr double euler_gamma = 0.57721566490153286061;

void check_degree(int n, const char* who)
{
    if (n < 0 || n > max_degree)
        throw DomainError(std::string(who) + ": degree must lie in [0, " +
                          std::to_string(max_degree) + "], got " + std::to_string(n));
}

// P_n^{(a,b)}(z) alone.
double jacobi_value(int n, double a, double b, double z)
{
    if (n == 0)
        return 1.0;
    double p0 = 1.0;
    double p1 = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * z;
    for (int k = 2; k <= n; ++k) {
        const double s = 2.0 * k + a + b;
        const double den = 2.0 * k * (k + a + b) * (s - 2.0);
        if (den == 0.0)
            throw DomainError("jacobi: recurrence denominator 2k(k+a+b)(2k+a+b-2) vanishes at k = " +
                              std::to_string(k));
        const double c1 = (s - 1.0) * (s * (s - 2.0) * z + a * a - b * b);
        const double c2 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
        const double p2 = (c1 * p1 - c2 * p0) / den;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

} // namespace

PolyEval hermite(int n, double u)
{
    check_degree(n, "hermite");
    PolyEval r{n, 0.0, 0.0, 1.0, 0.0};
    if (n == 0)
        return r;
    double hm = 1.0, h = 2.0 * u;
    for (int k = 1; k < n; ++k) {
        const double next = 2.0 * u * h - 2.0 * k * hm;
        hm = h;
        h = next;
    }
    r.value = h;
    r.derivative = 2.0 * n * hm;
    return r;
}

PolyEval jacobi(int n, double a, double b, double z)
{
    check_degree(n, "jacobi");
    PolyEval r{n, a, b, jacobi_value(n, a, b, z), 0.0};
    if (n > 0)
        r.derivative = 0.5 * (n + a + b + 1.0) * jacobi_value(n - 1, a + 1.0, b + 1.0, z);
    return r;
}

double bessel_k_series(int order, double z)
{
    if (!(z > 0.0))
        throw DomainError("bessel_k: need z > 0");
    const double q = 0.25 * z * z;
    const double lg = std::log(0.5 * z);
    if (order == 0) {
        // K0 = -(ln(z/2) + gamma) I0 + sum_k q^k/(k!)^2 H_k
        double term = 1.0, i0 = 1.0, tail = 0.0, hk = 0.0;
        for (int k = 1; k < 200; ++k) {
            term *= q / (double(k) * k);
            hk += 1.0 / k;
            i0 += term;
            tail += term * hk;
            if (term * (hk + 1.0) < 1e-18 * (i0 + tail))
                break;
        }
        return -(lg + euler_gamma) * i0 + tail;
    }
    if (order == 1) {
        // K1 = 1/z + ln(z/2) I1 - (z/4) sum_k [psi(k+1) + psi(k+2)] q^k/(k!(k+1)!)
        double term = 1.0; // q^k / (k! (k+1)!)
        double psi1 = -euler_gamma, psi2 = 1.0 - euler_gamma;
        double i1 = 1.0, tail = psi1 + psi2;
        for (int k = 1; k < 200; ++k) {
            term *= q / (double(k) * (k + 1));
            psi1 += 1.0 / k;
            psi2 += 1.0 / (k + 1);
            i1 += term;
            tail += term * (psi1 + psi2);
            if (term * (std::abs(psi1) + std::abs(psi2) + 1.0) < 1e-18 * std::abs(tail))
                break;
        }
        return 1.0 / z + lg * 0.5 * z * i1 - 0.25 * z * tail;
    }
    throw DomainError("bessel_k: only orders 0 and 1 are provided");
}

double bessel_k_cf(int order, double z)
{
    if (!(z > 0.0))
        throw DomainError("bessel_k: need z > 0");
    if (order != 0 && order != 1)
        throw DomainError("bessel_k: only orders 0 and 1 are provided");
    // Steed's CF2 with Temme's normalisation (nu = 0).
    constexpr double eps = 1e-17;
    double b = 2.0 * (1.0 + z);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25;
    double q = a1, c = a1, a = -a1;
    double s = 1.0 + q * delh;
    int i = 1;
    for (; i < 10000; ++i) {
        a -= 2.0 * i;
        c = -a * c / (i + 1.0);
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < eps)
            break;
    }
    if (i >= 10000)
        throw NumericalError("bessel_k: continued fraction did not converge");
    h *= a1;
    const double k0 = std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z) / s;
    if (order == 0)
        return k0;
    return k0 * (z + 0.5 - h) / z;
}

double bessel_k(int order, double z)
{
    if (!(z > 0.0))
        throw DomainError("bessel_k: need z > 0, got " + std::to_string(z));
    return z <= bessel_seam ? bessel_k_series(order, z) : bessel_k_cf(order, z);
}

double bessel_k_integral(int order, double z)
{
    if (!(z > 0.0))
        throw DomainError("bessel_k_integral: need z > 0");
    const double nu = order;
    // Scaled by e^z to keep the integrand O(1) near t = 0.
    auto f = [=](double t) {
        const double e = -z * (std::cosh(t) - 1.0);
        return e < -745.0 ? 0.0 : std::exp(e) * std::cosh(nu * t);
    };
    const auto r = quad::adaptive_to_infinity(f, 0.0, 1e-14);
    return std::exp(-z) * r.value;
}

double confluent_u(double a, double b, double z, double rel_tol)
{
    if (!(a > 0.0))
        throw DomainError("confluent_u: need a > 0");
    if (!(z > 0.0))
        throw DomainError("confluent_u: need z > 0");
    // t = s^{1/a} removes the t^{a-1} endpoint singularity:
    //   U = 1/Gamma(a+1) int_0^inf exp(-z s^{1/a}) (1 + s^{1/a})^{b-a-1} ds
    const double inv = 1.0 / a;
    auto f = [=](double s) {
        const double t = std::pow(s, inv);
        if (!std::isfinite(t))
            return 0.0;
        return std::exp(-z * t) * std::pow(1.0 + t, b - a - 1.0);
    };
    const auto lo = quad::adaptive(f, 0.0, 1.0, rel_tol);
    const auto hi = quad::adaptive_to_infinity(f, 1.0, rel_tol);
    if (!lo.converged || !hi.converged)
        throw NumericalError("confluent_u: quadrature did not converge");
    return (lo.value + hi.value) / std::tgamma(a + 1.0);
}

} // namespace ptdirac::specfun
