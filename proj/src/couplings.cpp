#include "ptdirac/couplings.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ptdirac/errors.hpp"

namespace ptdirac {

namespace {

constexpr cplx I{0.0, 1.0};

// Finite-difference derivatives of a sampled array at node i.
struct NodeDerivs {
    cplx f, d1, d2;
};

NodeDerivs node_derivs(const std::vector<cplx>& f, int i, double h)
{
    const int n = static_cast<int>(f.size());
    NodeDerivs r{f[i], {}, {}};
    const double h2 = h * h;
    if (i == 0) {
        r.d1 = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
        r.d2 = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    } else if (i == n - 1) {
        r.d1 = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
        r.d2 = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    } else {
        r.d1 = (f[i + 1] - f[i - 1]) / (2.0 * h);
        r.d2 = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    }
    return r;
}

} // namespace

std::string to_string(FamilyTag tag)
{
    switch (tag) {
    case FamilyTag::Quadratic: return "quadratic";
    case FamilyTag::Oscillator: return "oscillator";
    case FamilyTag::RosenMorse: return "rosen_morse";
    case FamilyTag::GenericSampled: return "generic";
    }
    return "unknown";
}

CouplingFamily CouplingFamily::quadratic(const QuadraticParams& p)
{
    if (!std::isfinite(p.a1) || !std::isfinite(p.b1) || !std::isfinite(p.a2))
        throw ParameterError("quadratic: parameters must be finite");
    if (!std::isfinite(quadratic_a0(p)))
        throw ParameterError("quadratic: derived a0 is not finite");
    return CouplingFamily(p, 0.0);
}

CouplingFamily CouplingFamily::oscillator(const OscillatorParams& p, double v0)
{
    const double w2 = p.omega2 * p.omega2 - p.omega1 * p.omega1;
    if (!(w2 > 0.0))
        throw ParameterError("oscillator: need omega2^2 - omega1^2 > 0, got " + std::to_string(w2));
    if (!std::isfinite(p.m1) || !std::isfinite(p.m2) || !std::isfinite(v0))
        throw ParameterError("oscillator: parameters must be finite");
    return CouplingFamily(p, v0);
}

CouplingFamily CouplingFamily::rosen_morse(const RosenMorseParams& p, double v0)
{
    if (!(p.mu > 0.0))
        throw ParameterError("rosen_morse: need mu > 0");
    const double u1sq = p.P1 * p.P1 - p.M1 * p.M1;
    if (!(u1sq > 0.0))
        throw ParameterError("rosen_morse: need P1^2 - M1^2 > 0 (no binding well), got " +
                             std::to_string(u1sq));
    if (!std::isfinite(p.M0) || !std::isfinite(p.P0) || !std::isfinite(v0))
        throw ParameterError("rosen_morse: parameters must be finite");
    return CouplingFamily(p, v0);
}

CouplingFamily CouplingFamily::sampled(SampledCouplings s)
{
    s.grid.validate();
    const auto n = static_cast<std::size_t>(s.grid.n);
    if (s.M.size() != n || s.P.size() != n || s.Vt.size() != n)
        throw ParameterError("generic: M, P, V arrays must all match the grid length");
    return CouplingFamily(std::move(s), 0.0);
}

FamilyTag CouplingFamily::tag() const noexcept
{
    return static_cast<FamilyTag>(params_.index());
}

const QuadraticParams& CouplingFamily::quadratic_params() const
{
    if (auto* p = std::get_if<QuadraticParams>(&params_))
        return *p;
    throw ParameterError("family is not quadratic");
}

const OscillatorParams& CouplingFamily::oscillator_params() const
{
    if (auto* p = std::get_if<OscillatorParams>(&params_))
        return *p;
    throw ParameterError("family is not oscillator");
}

const RosenMorseParams& CouplingFamily::rosen_morse_params() const
{
    if (auto* p = std::get_if<RosenMorseParams>(&params_))
        return *p;
    throw ParameterError("family is not rosen_morse");
}

const SampledCouplings& CouplingFamily::samples() const
{
    if (auto* p = std::get_if<SampledCouplings>(&params_))
        return *p;
    throw ParameterError("family is not generic/sampled");
}

double quadratic_a0(const QuadraticParams& p)
{
    return std::hypot(p.a1, p.a2);
}

CouplingJet coupling_jet(const CouplingFamily& fam, cplx x)
{
    CouplingJet j{};
    switch (fam.tag()) {
    case FamilyTag::Quadratic: {
        const auto& p = fam.quadratic_params();
        const double a0 = quadratic_a0(p);
        j.M = a0 * x * x;
        j.dM = 2.0 * a0 * x;
        j.d2M = 2.0 * a0;
        j.P = I * (p.a1 * x * x + p.b1);
        j.dP = I * (2.0 * p.a1 * x);
        j.d2P = I * (2.0 * p.a1);
        j.Vt = p.a2 * x * x;
        j.dVt = 2.0 * p.a2 * x;
        return j;
    }
    case FamilyTag::Oscillator: {
        const auto& p = fam.oscillator_params();
        j.M = I * p.omega1 * x + p.m1;
        j.dM = I * p.omega1;
        j.P = p.omega2 * x + I * p.m2;
        j.dP = p.omega2;
        j.Vt = fam.v0();
        return j;
    }
    case FamilyTag::RosenMorse: {
        const auto& p = fam.rosen_morse_params();
        const cplx t = std::tanh(p.mu * x);
        const cplx dt = p.mu * (1.0 - t * t);
        const cplx d2t = -2.0 * p.mu * t * dt;
        j.M = I * p.M1 * t + p.M0;
        j.dM = I * p.M1 * dt;
        j.d2M = I * p.M1 * d2t;
        j.P = p.P1 * t + I * p.P0;
        j.dP = p.P1 * dt;
        j.d2P = p.P1 * d2t;
        j.Vt = fam.v0();
        return j;
    }
    case FamilyTag::GenericSampled: {
        const auto& s = fam.samples();
        const int i = x.imag() == 0.0 ? s.grid.node_index(x.real()) : -1;
        if (i < 0) {
            std::ostringstream os;
            os << "generic: couplings requested off the sample grid at x = " << x;
            throw DomainError(os.str());
        }
        const double h = s.grid.h();
        const auto m = node_derivs(s.M, i, h);
        const auto p = node_derivs(s.P, i, h);
        const auto v = node_derivs(s.Vt, i, h);
        j.M = m.f;
        j.dM = m.d1;
        j.d2M = m.d2;
        j.P = p.f;
        j.dP = p.d1;
        j.d2P = p.d2;
        j.Vt = v.f;
        j.dVt = v.d1;
        return j;
    }
    }
    throw ParameterError("unknown family tag");
}

Couplings eval_couplings(const CouplingFamily& fam, double x)
{
    if (!std::isfinite(x))
        throw DomainError("eval_couplings: x must be finite");
    const auto j = coupling_jet(fam, cplx(x, 0.0));
    return {j.M, j.P, j.Vt};
}

std::pair<cplx, cplx> a_plus_minus(const CouplingFamily& fam, double x)
{
    const auto c = eval_couplings(fam, x);
    return {c.M + I * c.P, c.M - I * c.P};
}

std::optional<double> a_plus_real_zero(const CouplingFamily& fam)
{
    switch (fam.tag()) {
    case FamilyTag::Quadratic: {
        // A_+ = (a0 - a1) x^2 - b1
        const auto& p = fam.quadratic_params();
        const double c2 = quadratic_a0(p) - p.a1;
        if (c2 == 0.0)
            return p.b1 == 0.0 ? std::optional<double>(0.0) : std::nullopt;
        const double r = p.b1 / c2;
        if (r < 0.0)
            return std::nullopt;
        return std::sqrt(r);
    }
    case FamilyTag::Oscillator: {
        // A_+ = (m1 - m2) + i (w1 + w2) x
        const auto& p = fam.oscillator_params();
        if (p.m1 == p.m2)
            return 0.0;
        return std::nullopt;
    }
    case FamilyTag::RosenMorse: {
        // A_+ = (M0 - P0) + i (M1 + P1) tanh(mu x)
        const auto& p = fam.rosen_morse_params();
        if (p.M0 == p.P0)
            return 0.0;
        return std::nullopt;
    }
    case FamilyTag::GenericSampled: {
        const auto& s = fam.samples();
        double scale = 0.0;
        for (int i = 0; i < s.grid.n; ++i)
            scale = std::max({scale, std::abs(s.M[i]), std::abs(s.P[i])});
        for (int i = 0; i < s.grid.n; ++i)
            if (std::abs(s.M[i] + I * s.P[i]) <= 1e-13 * std::max(scale, 1.0))
                return s.grid.x(i);
        return std::nullopt;
    }
    }
    return std::nullopt;
}

double PTReport::max_violation() const noexcept
{
    return std::max({re_m_even, im_m_odd, re_v_even, im_v_odd, re_p_odd, im_p_even});
}

std::string PTReport::worst() const
{
    if (pass)
        return {};
    const std::pair<double, const char*> parts[] = {
        {re_m_even, "Re M even"}, {im_m_odd, "Im M odd"},   {re_v_even, "Re V even"},
        {im_v_odd, "Im V odd"},   {re_p_odd, "Re P odd"},   {im_p_even, "Im P even"},
    };
    return std::max_element(std::begin(parts), std::end(parts),
                            [](const auto& a, const auto& b) { return a.first < b.first; })
        ->second;
}

PTReport pt_check(const CouplingFamily& fam, const GridSpec& grid, double tol)
{
    grid.validate();
    if (!grid.is_symmetric())
        throw PreconditionError("pt_check: grid must be symmetric about 0 (x_min = -x_max)");
    if (fam.tag() == FamilyTag::GenericSampled) {
        const auto& g = fam.samples().grid;
        if (g.n != grid.n || std::abs(g.x_min - grid.x_min) > 1e-12 || std::abs(g.x_max - grid.x_max) > 1e-12)
            throw PreconditionError("pt_check: sampled family must be checked on its own grid");
    }

    PTReport r;
    r.tol = tol;
    auto upd = [](double& slot, double v) { slot = std::max(slot, std::abs(v)); };
    for (int i = 0; i < grid.n; ++i) {
        const int k = grid.n - 1 - i;
        if (k < i)
            break;
        const double x = grid.x(i);
        const auto a = eval_couplings(fam, x);
        const auto b = eval_couplings(fam, fam.analytic() ? -x : grid.x(k));
        upd(r.re_m_even, a.M.real() - b.M.real());
        upd(r.im_m_odd, a.M.imag() + b.M.imag());
        upd(r.re_v_even, a.Vt.real() - b.Vt.real());
        upd(r.im_v_odd, a.Vt.imag() + b.Vt.imag());
        upd(r.re_p_odd, a.P.real() + b.P.real());
        upd(r.im_p_even, a.P.imag() - b.P.imag());
    }
    r.pass = r.max_violation() <= tol;
    return r;
}

} // namespace ptdirac
