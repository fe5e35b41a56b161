#include "ptdirac/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "ptdirac/errors.hpp"

namespace ptdirac::quad {

namespace {

// QUADPACK qk15 abscissae and weights.
constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b)
{
    const double c = 0.5 * (a + b);
    const double r = 0.5 * (b - a);
    const double fc = f(c);
    double k = wgk[7] * fc;
    double g = wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = r * xgk[j];
        const double s = f(c - dx) + f(c + dx);
        k += wgk[j] * s;
        if (j % 2 == 1)
            g += wg[j / 2] * s;
    }
    return {a, b, k * r, std::abs((k - g) * r)};
}

} // namespace

Result adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                double abs_tol, int max_intervals)
{
    if (a == b)
        return {0.0, 0.0, true, 0};
    std::priority_queue<Panel> heap;
    Panel p0 = gk15(f, a, b);
    double total = p0.value;
    double err = p0.error;
    heap.push(p0);
    int count = 1;
    while (err > std::max(abs_tol, rel_tol * std::abs(total)) && count < max_intervals) {
        Panel p = heap.top();
        heap.pop();
        const double m = 0.5 * (p.a + p.b);
        if (!(m > std::min(p.a, p.b) && m < std::max(p.a, p.b))) {
            // Interval can no longer be split in double precision.
            heap.push(p);
            break;
        }
        Panel l = gk15(f, p.a, m);
        Panel r = gk15(f, m, p.b);
        total += l.value + r.value - p.value;
        err += l.error + r.error - p.error;
        heap.push(l);
        heap.push(r);
        ++count;
    }
    // Re-sum to shed accumulated cancellation from the running updates.
    double sum = 0.0, esum = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        esum += heap.top().error;
        heap.pop();
    }
    if (!std::isfinite(sum))
        throw NumericalError("quadrature: non-finite integrand");
    return {sum, esum, esum <= std::max(abs_tol, rel_tol * std::abs(sum)), count};
}

Result adaptive_to_infinity(const std::function<double(double)>& f, double a, double rel_tol,
                            double abs_tol, int max_intervals)
{
    auto g = [&](double t) {
        if (t >= 1.0)
            return 0.0;
        const double u = 1.0 - t;
        const double v = f(a + t / u) / (u * u);
        return std::isfinite(v) ? v : 0.0;
    };
    return adaptive(g, 0.0, 1.0, rel_tol, abs_tol, max_intervals);
}

double simpson(std::span<const double> f, double h)
{
    const std::size_t n = f.size();
    if (n < 2)
        return 0.0;
    if (n == 2)
        return 0.5 * h * (f[0] + f[1]);
    std::size_t m = n - 1; // intervals
    double tail = 0.0;
    if (m % 2 == 1) {
        if (m == 1)
            return 0.5 * h * (f[0] + f[1]);
        // 3/8 rule on the last three intervals.
        const std::size_t k = n - 4;
        tail = 3.0 * h / 8.0 * (f[k] + 3.0 * f[k + 1] + 3.0 * f[k + 2] + f[k + 3]);
        m -= 3;
    }
    double s = 0.0;
    if (m > 0) {
        s = f[0] + f[m];
        for (std::size_t i = 1; i < m; ++i)
            s += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
        s *= h / 3.0;
    }
    return s + tail;
}

} // namespace ptdirac::quad
