#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "../oracles/reference_values.hpp"
#include "ptdirac/errors.hpp"
#include "ptdirac/oracle.hpp"

using namespace ptdirac;

namespace {
const auto osc = CouplingFamily::oscillator({0.6, 0.5, 1.0, 0.3});
const auto rm = CouplingFamily::rosen_morse({0.0, 0.0, 0.25 / std::sqrt(0.75), std::sqrt(0.75), 1.0});

PotentialBuilder literal(std::function<double(double)> M, std::function<double(double)> V)
{
    return [=](const GridSpec& g) {
        std::vector<cplx> m(g.n), p(g.n, 0.0), v(g.n);
        for (int i = 0; i < g.n; ++i) {
            m[i] = M(g.x(i));
            v[i] = V(g.x(i));
        }
        return literal_potentials(g, m, p, v);
    };
}

const SpectrumState* find(const Spectrum& sp, double E, double tol)
{
    for (const auto& s : sp.states)
        if (std::abs(s.energy - E) < tol)
            return &s;
    return nullptr;
}
} // namespace

TEST_CASE("real couplings give a hermitian operator")
{
    const auto p = literal([](double x) { return std::tanh(x); }, [](double) { return 0.2; })(GridSpec::symmetric(5, 41));
    CHECK(hermiticity_defect(p, Stencil::Stabilized) < 1e-12);
    CHECK(hermiticity_defect(p, Stencil::Centered) < 1e-12);
    CHECK(hermiticity_defect(p, Stencil::OneSided) > 1.0);
}

TEST_CASE("hermitian limit: real eigenvalues in +- pairs")
{
    const auto p = literal([](double x) { return std::tanh(x); }, [](double) { return 0.0; })(GridSpec::symmetric(10, 201));
    auto ev = dirac_eigenvalues(p, Stencil::Stabilized);
    std::vector<double> re;
    for (auto e : ev) {
        CHECK(std::abs(e.imag()) < 1e-10);
        re.push_back(e.real());
    }
    std::sort(re.begin(), re.end());
    for (std::size_t i = 0; i < re.size(); ++i)
        CHECK(std::abs(re[i] + re[re.size() - 1 - i]) < 1e-8);
}

TEST_CASE("alternation detector")
{
    std::vector<cplx> smooth(50), alt(50), zero(50, 0.0);
    for (int i = 0; i < 50; ++i) {
        smooth[i] = std::sin(0.05 * i + 0.1);
        alt[i] = (i % 2 ? -1.0 : 1.0) * std::sin(0.05 * i + 0.1);
    }
    CHECK(alternation_fraction(smooth, zero) < 0.01);
    CHECK(alternation_fraction(alt, zero) > 0.99);
}

TEST_CASE("centered stencil breeds doublers, the filter removes them")
{
    const auto g = GridSpec::symmetric(12, 301);
    const auto build = family_builder(osc, VectorGauge::Direct);
    DiracOptions o;
    o.stencil = Stencil::Centered;
    o.window_lo = -2.5;
    o.window_hi = 2.5;
    const auto sp = dirac_spectrum(build, g, o);
    bool doubler_rejected = false;
    for (const auto& d : sp.diagnostics)
        doubler_rejected = doubler_rejected || d.find("doubler") != std::string::npos;
    CHECK(doubler_rejected);
    // -E0 survives. +E0 sits on top of the doubler of the other branch, the
    // two mix and the filter throws the pair out; that is why the stabilized
    // stencil is the default.
    CHECK(find(sp, -ref::osc_e0, 5e-3));
}

TEST_CASE("one-sided stencil corroborates at O(h)")
{
    DiracOptions o;
    o.stencil = Stencil::OneSided;
    o.window_lo = 0.5;
    o.window_hi = 1.5;
    // non-hermitian at O(h): Im E is about 0.01 on this grid and halves with h
    o.im_tol = 0.05;
    const auto sp = dirac_spectrum(osc, GridSpec::symmetric(12, 801), o);
    const auto* s = find(sp, ref::osc_e0, 0.05);
    REQUIRE(s);
    CHECK(std::abs(s->energy - ref::osc_e0) < 1e-3);
}

TEST_CASE("free massive gap: nothing localized inside |E| < 1")
{
    DiracOptions o;
    o.window_lo = -1.0;
    o.window_hi = 1.0;
    const auto sp = dirac_spectrum(literal([](double) { return 1.0; }, [](double) { return 0.0; }),
                                   GridSpec::uniform(-20, 20, 2000), o);
    CHECK(sp.states.empty());
}

TEST_CASE("constant vector potential shifts the free problem")
{
    DiracOptions o;
    const auto sp = dirac_spectrum(literal([](double) { return 0.0; }, [](double) { return 0.7; }),
                                   GridSpec::symmetric(20, 801), o, 0.7);
    CHECK(sp.states.empty());
}

TEST_CASE("lambda = 0 oscillator: +-1, +-sqrt3, +-sqrt5")
{
    const auto f = CouplingFamily::oscillator({0.0, 0.0, 1.0, 0.0});
    const auto g = GridSpec::symmetric(10, 1201);
    CHECK(resolve_gauge(f, g, VectorGauge::Auto) == VectorGauge::Absorbed);
    DiracOptions o;
    o.window_lo = -2.4;
    o.window_hi = 2.4;
    const auto sp = dirac_spectrum(f, g, o);
    for (double e : {1.0, std::sqrt(3.0), std::sqrt(5.0)}) {
        CHECK(find(sp, e, 1e-3));
        CHECK(find(sp, -e, 1e-3));
    }
}

TEST_CASE("quadratic: oracle confirms E+ and not E-")
{
    const auto q = CouplingFamily::quadratic({0.0, 0.0, 1.0});
    DiracOptions o;
    o.window_lo = 0.0;
    o.window_hi = 2.0;
    const auto sp = dirac_spectrum(q, GridSpec::symmetric(8, 1201), o);
    CHECK(find(sp, ref::quad_e_plus, 1e-3));
    CHECK_FALSE(find(sp, ref::quad_e_minus, 0.05));
}

TEST_CASE("refinement converges to a small residual")
{
    const auto g = GridSpec::symmetric(12, 2001);
    const auto p = direct_potentials(osc, g);
    const auto ep = refine_eigenpair(p, cplx(1.2, 0.0), Stencil::Stabilized);
    CHECK(std::abs(ep.energy - ref::osc_e0) < 1e-4);
    CHECK(ep.residual < 1e-10);
    CHECK(ep.edge_weight < 1e-20);
    CHECK(ep.alternation < 1e-3);
}

TEST_CASE("dirac oracle converges at second order")
{
    DiracOptions o;
    o.window_lo = 1.0;
    o.window_hi = 1.5;
    const auto a = dirac_spectrum(osc, GridSpec::symmetric(12, 1001), o);
    const auto b = dirac_spectrum(osc, GridSpec::symmetric(12, 2001), o);
    REQUIRE(a.states.size() == 1);
    REQUIRE(b.states.size() == 1);
    const double ra = std::abs(a.states[0].energy - ref::osc_e0), rb = std::abs(b.states[0].energy - ref::osc_e0);
    CHECK(ra / rb > 3.5);
    CHECK(ra / rb < 4.5);
}

TEST_CASE("shooting: harmonic oscillator")
{
    const EffectiveProblem p([](double x, double) { return cplx(x * x, 0.0); }, false);
    const auto g = GridSpec::symmetric(10, 4001);
    for (double e2 : {1.0, 3.0, 5.0}) {
        const double e = std::sqrt(e2);
        const auto r = shoot_effective(p, g, e - 0.2, e + 0.2);
        REQUIRE(r.found);
        CHECK(std::abs(r.energy * r.energy - e2) < 1e-8);
    }
    const auto none = shoot_effective(p, g, 1.2, 1.6);
    CHECK_FALSE(none.found);
    CHECK_FALSE(none.message.empty());
}

TEST_CASE("shooting: complex oscillator and Rosen-Morse")
{
    const auto po = EffectiveProblem::from_family(osc);
    const auto g = GridSpec::symmetric(12, 4001);
    const auto r = shoot_effective(po, g, 1.1, 1.4);
    REQUIRE(r.found);
    CHECK(std::abs(r.energy - ref::osc_e0) < 1e-8);
    // match node moved by +-10% of the box
    ShootOptions lo, hi;
    lo.match_fraction = 0.4;
    hi.match_fraction = 0.6;
    CHECK(std::abs(shoot_effective(po, g, 1.1, 1.4, lo).energy - r.energy) < 1e-9);
    CHECK(std::abs(shoot_effective(po, g, 1.1, 1.4, hi).energy - r.energy) < 1e-9);

    const auto pr = EffectiveProblem::from_family(rm);
    const auto rr = shoot_effective(pr, GridSpec::symmetric(60, 12001), 0.7, 0.9);
    REQUIRE(rr.found);
    CHECK(std::abs(rr.energy - ref::rm_e0) < 1e-6);
}

TEST_CASE("shooting needs decaying tails")
{
    const EffectiveProblem p([](double x, double) { return cplx(-x * x, 0.0); }, false);
    CHECK_THROWS_AS(shooting_mismatch(p, GridSpec::symmetric(5, 101), 1.0), PreconditionError);
}

TEST_CASE("effective eigenfunction is normalised at its peak")
{
    const EffectiveProblem p([](double x, double) { return cplx(x * x, 0.0); }, false);
    const auto g = GridSpec::symmetric(8, 801);
    const auto chi = effective_eigenfunction(p, g, 1.0);
    double big = 0.0;
    for (auto z : chi)
        big = std::max(big, std::abs(z));
    CHECK(big == doctest::Approx(1.0));
    CHECK(std::abs(chi[400] - std::exp(0.0)) < 1e-6);
}

TEST_CASE("fixed point: filtered root, spurious root, b1 != 0")
{
    const auto q = CouplingFamily::quadratic({0.0, 0.0, 1.0});
    const auto r = fixed_point_energy(q, 0, 1.4);
    CHECK(std::abs(r.energy - ref::quad_e_plus) < 1e-9);
    CHECK(r.trace.size() == static_cast<std::size_t>(r.iterations) + 1);

    bool reached_spurious = false;
    try {
        const auto s = fixed_point_energy(q, 0, 0.44);
        reached_spurious = std::abs(s.energy - ref::quad_e_minus) < 1e-6;
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("trace:") != std::string::npos);
    }
    CHECK_FALSE(reached_spurious);

    const auto qb = CouplingFamily::quadratic({0.0, 0.1, 1.0});
    const auto rb = fixed_point_energy(qb, 0, 1.4);
    CHECK(std::abs(quadratic_spectral_residual(qb.quadratic_params(), 0, rb.energy)) < 1e-9);

    CHECK_THROWS_AS(fixed_point_energy(q, 0, -0.5), NumericalError);
}

TEST_CASE("quadrature norm: Gaussian, NaN, z-grid")
{
    const auto g = GridSpec::symmetric(10, 2001);
    SpinorOnGrid sp;
    sp.grid = g;
    for (int i = 0; i < g.n; ++i) {
        sp.psi_plus.push_back(std::exp(-0.5 * g.x(i) * g.x(i)) / std::pow(M_PI, 0.25));
        sp.psi_minus.push_back(0.0);
    }
    CHECK(std::abs(quadrature_norm(sp) - 1.0) < 1e-10);
    sp.psi_plus[5] = std::nan("");
    CHECK_THROWS_AS(quadrature_norm(sp), NumericalError);

    // sech(x) = sqrt(1 - z^2); int sech^2 dx = 2
    const int nz = 4000;
    SpinorOnGrid zs;
    zs.variable = SpinorVariable::TanhZ;
    zs.grid = GridSpec{-1 + 1.0 / nz, 1 - 1.0 / nz, nz};
    for (int i = 0; i < nz; ++i) {
        const double z = zs.grid.x(i);
        zs.psi_plus.push_back(std::sqrt(1 - z * z));
        zs.psi_minus.push_back(0.0);
    }
    CHECK(std::abs(quadrature_norm(zs) - 2.0) < 1e-6);
}

TEST_CASE("residual check: plane wave O(h^2), wrong energy O(1)")
{
    const double k = 0.8, E = std::sqrt(1 + k * k);
    auto run = [&](int n, double e) {
        const auto g = GridSpec::symmetric(10, n);
        SampledCouplings s{g, std::vector<cplx>(n, 1.0), std::vector<cplx>(n, 0.0), std::vector<cplx>(n, 0.0)};
        const auto fam = CouplingFamily::sampled(s);
        SpinorOnGrid sp;
        sp.grid = g;
        for (int i = 0; i < n; ++i) {
            const cplx w = std::exp(cplx(0, k * g.x(i)));
            sp.psi_plus.push_back(w);
            sp.psi_minus.push_back((E - k) * w);
        }
        return residual_check(sp, fam, e);
    };
    const double r1 = run(401, E), r2 = run(801, E);
    CHECK(r1 < 1e-2);
    CHECK(r1 / r2 > 3.9);
    CHECK(r1 / r2 < 4.1);
    const double w1 = run(401, E + 0.1), w2 = run(801, E + 0.1);
    CHECK(w1 > 0.05);
    CHECK(w2 > 0.9 * w1);
}
