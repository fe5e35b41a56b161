#include "ptdirac/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "ptdirac/errors.hpp"
#include "ptdirac/oracle.hpp"

namespace ptdirac {

namespace {

constexpr cplx I{0.0, 1.0};

void require_nonzero(const CouplingJet& j, cplx x, const char* who)
{
    const double scale = std::max({1.0, std::abs(j.M), std::abs(j.P)});
    if (std::abs(j.a_plus()) <= 1e-13 * scale) {
        std::ostringstream os;
        os << who << ": A_+ = M + iP vanishes at x = " << x;
        throw SingularityError(os.str(), x.real());
    }
}

cplx veff_from_jet(const CouplingJet& j, double E)
{
    return j.M * j.M + j.P * j.P - j.Vt * j.Vt + 2.0 * E * j.Vt - I * j.dVt;
}

} // namespace

cplx constrained_vector(const CouplingFamily& fam, cplx x)
{
    const auto j = coupling_jet(fam, x);
    require_nonzero(j, x, "constrained_vector");
    return 0.5 * I * j.da_plus() / j.a_plus() + j.Vt;
}

cplx constrained_vector(const CouplingFamily& fam, double x)
{
    return constrained_vector(fam, cplx(x, 0.0));
}

cplx effective_potential(const CouplingFamily& fam, double E, cplx x)
{
    return veff_from_jet(coupling_jet(fam, x), E);
}

cplx effective_potential(const CouplingFamily& fam, double E, double x)
{
    return effective_potential(fam, E, cplx(x, 0.0));
}

EffectiveParts effective_decomposition(const CouplingFamily& fam, double E, double x)
{
    const auto j = coupling_jet(fam, cplx(x, 0.0));
    const double Mr = j.M.real(), Mi = j.M.imag();
    const double Pr = j.P.real(), Pi = j.P.imag();
    const double Vr = j.Vt.real(), Vi = j.Vt.imag();
    const double dVr = j.dVt.real(), dVi = j.dVt.imag();
    EffectiveParts r;
    r.re = Mr * Mr - Mi * Mi + Pr * Pr - Pi * Pi - Vr * Vr + Vi * Vi + 2.0 * E * Vr + dVi;
    r.im = 2.0 * (Mr * Mi + Pr * Pi - Vr * Vi + E * Vi) - dVr;
    return r;
}

std::vector<cplx> general_effective_potential(const SampledCouplings& s, double E)
{
    s.grid.validate();
    const auto n = static_cast<std::size_t>(s.grid.n);
    if (s.M.size() != n || s.P.size() != n || s.Vt.size() != n)
        throw ParameterError("general_effective_potential: arrays must match the grid");
    const double h = s.grid.h();

    std::vector<cplx> ap(n), am(n);
    for (std::size_t i = 0; i < n; ++i) {
        ap[i] = s.M[i] + I * s.P[i];
        am[i] = s.M[i] - I * s.P[i];
        const double scale = std::max({1.0, std::abs(s.M[i]), std::abs(s.P[i])});
        if (std::abs(ap[i]) <= 1e-13 * scale) {
            std::ostringstream os;
            os << "general_effective_potential: A_+ vanishes at x = " << s.grid.x(static_cast<int>(i));
            throw SingularityError(os.str(), s.grid.x(static_cast<int>(i)));
        }
    }
    const auto dap = derivative(ap, h);
    const auto d2ap = second_derivative(ap, h);
    const auto dV = derivative(s.Vt, h);

    std::vector<cplx> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx L = dap[i] / ap[i];
        const cplx V = s.Vt[i];
        out[i] = ap[i] * am[i] - V * V + E * (2.0 * V - I * L) - I * dV[i] + I * L * V +
                 0.75 * L * L - 0.5 * d2ap[i] / ap[i];
    }
    return out;
}

std::vector<cplx> pure_vector_effective(const GridSpec& grid, std::span<const cplx> V, double E)
{
    grid.validate();
    if (V.size() != static_cast<std::size_t>(grid.n))
        throw ParameterError("pure_vector_effective: V must match the grid");
    const auto dV = derivative(V, grid.h());
    std::vector<cplx> out(V.size());
    for (std::size_t i = 0; i < V.size(); ++i) {
        const cplx b = E - V[i];
        out[i] = -I * dV[i] - b * b;
    }
    return out;
}

EffectiveProblem::EffectiveProblem(Potential u, bool energy_dependent, double v0,
                                   std::optional<GridSpec> domain)
    : u_(std::move(u)), energy_dependent_(energy_dependent), v0_(v0), domain_(std::move(domain))
{
    if (!u_)
        throw ParameterError("EffectiveProblem: empty potential");
}

EffectiveProblem EffectiveProblem::from_family(const CouplingFamily& fam)
{
    switch (fam.tag()) {
    case FamilyTag::Oscillator:
    case FamilyTag::RosenMorse: {
        // V~ = v0: the 2 E v0 - v0^2 piece sits on the right-hand side.
        auto u = [fam](double x, double) {
            const auto j = coupling_jet(fam, cplx(x, 0.0));
            return j.M * j.M + j.P * j.P;
        };
        return EffectiveProblem(u, false, fam.v0());
    }
    case FamilyTag::Quadratic: {
        auto u = [fam](double x, double E) { return effective_potential(fam, E, x); };
        return EffectiveProblem(u, true, 0.0);
    }
    case FamilyTag::GenericSampled: {
        // V_eff = base(x) + 2 E V~(x), both parts tabulated once and
        // linearly interpolated between nodes.
        const auto& s = fam.samples();
        const int n = s.grid.n;
        auto base = std::make_shared<std::vector<cplx>>(n);
        auto vt = std::make_shared<std::vector<cplx>>(s.Vt);
        const auto dV = derivative(s.Vt, s.grid.h());
        for (int i = 0; i < n; ++i)
            (*base)[i] = s.M[i] * s.M[i] + s.P[i] * s.P[i] - s.Vt[i] * s.Vt[i] - I * dV[i];
        const GridSpec g = s.grid;
        auto u = [g, base, vt](double x, double E) {
            const double t = (x - g.x_min) / g.h();
            if (!(t >= -1e-9 && t <= g.n - 1 + 1e-9))
                throw DomainError("EffectiveProblem: x outside the sampled grid");
            const int i = std::clamp(static_cast<int>(std::floor(t)), 0, g.n - 2);
            const double w = t - i;
            const cplx b = (1.0 - w) * (*base)[i] + w * (*base)[i + 1];
            const cplx v = (1.0 - w) * (*vt)[i] + w * (*vt)[i + 1];
            return b + 2.0 * E * v;
        };
        return EffectiveProblem(u, true, 0.0, g);
    }
    }
    throw ParameterError("EffectiveProblem: unknown family");
}

std::vector<cplx> sqrt_a_plus(const CouplingFamily& fam, const GridSpec& grid, cplx shift)
{
    std::vector<cplx> out(grid.n);
    double prev_arg = 0.0, phase = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        const cplx x = grid.x(i) + shift;
        const auto j = coupling_jet(fam, x);
        require_nonzero(j, x, "sqrt_a_plus");
        const cplx a = j.a_plus();
        const double arg = std::arg(a);
        if (i == 0) {
            phase = arg;
        } else {
            double d = arg - prev_arg;
            d -= 2.0 * std::numbers::pi * std::round(d / (2.0 * std::numbers::pi));
            phase += d;
        }
        prev_arg = arg;
        out[i] = std::polar(std::sqrt(std::abs(a)), 0.5 * phase);
    }
    return out;
}

SpinorOnGrid reconstruct_spinor(std::span<const cplx> chi, const CouplingFamily& fam, double E,
                                const GridSpec& grid)
{
    grid.validate();
    if (chi.size() != static_cast<std::size_t>(grid.n))
        throw ParameterError("reconstruct_spinor: chi must match the grid");
    const auto root = sqrt_a_plus(fam, grid);

    SpinorOnGrid sp;
    sp.grid = grid;
    sp.energy = E;
    sp.psi_plus.resize(grid.n);
    sp.psi_minus.resize(grid.n);
    for (int i = 0; i < grid.n; ++i)
        sp.psi_plus[i] = root[i] * chi[i];
    const auto dpp = derivative(sp.psi_plus, grid.h());
    for (int i = 0; i < grid.n; ++i) {
        const cplx x = grid.x(i);
        const auto j = coupling_jet(fam, x);
        const cplx V = 0.5 * I * j.da_plus() / j.a_plus() + j.Vt;
        sp.psi_minus[i] = (I * dpp[i] + (E - V) * sp.psi_plus[i]) / j.a_plus();
    }
    sp.norm = quadrature_norm(sp);
    sp.tail_flag = edge_fraction(sp) > 1e-6;
    return sp;
}

std::vector<double> SpinorOnGrid::density() const
{
    std::vector<double> d(psi_plus.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = std::norm(psi_plus[i]) + std::norm(psi_minus[i]);
    return d;
}

} // namespace ptdirac
