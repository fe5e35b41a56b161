#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ptdirac/errors.hpp"
#include "ptdirac/mapping.hpp"

using namespace ptdirac;

namespace {
const cplx I{0.0, 1.0};
const auto osc = CouplingFamily::oscillator({0.6, 0.5, 1.0, 0.3});
const auto rm = CouplingFamily::rosen_morse({0.0, 0.0, 0.25 / std::sqrt(0.75), std::sqrt(0.75), 1.0});
const auto rm_v0 = CouplingFamily::rosen_morse({0.2, 0.3, 0.25, 0.8, 1.3}, 0.4);
} // namespace

TEST_CASE("constrained vector is (i/2) A+'/A+ + V~")
{
    const double h = 1e-5;
    for (double x : {-1.3, 0.2, 2.7}) {
        const auto [ap, am] = a_plus_minus(rm_v0, x);
        const auto [app, amp] = a_plus_minus(rm_v0, x + h);
        const auto [apm, amm] = a_plus_minus(rm_v0, x - h);
        const cplx expect = 0.5 * I * (app - apm) / (2 * h) / ap + 0.4;
        CHECK(std::abs(constrained_vector(rm_v0, x) - expect) < 1e-9);
        (void)am, (void)amp, (void)amm;
    }
}

TEST_CASE("singular A+ raises with location")
{
    const auto q = CouplingFamily::quadratic({0.0, 0.0, 1.0});
    try {
        constrained_vector(q, 0.0);
        FAIL("expected SingularityError");
    } catch (const SingularityError& e) {
        CHECK(e.location() == doctest::Approx(0.0));
    }
    CHECK_NOTHROW(constrained_vector(q, 0.5));
}

TEST_CASE("decomposition matches complex evaluation")
{
    for (const auto& f : {osc, rm_v0, CouplingFamily::quadratic({0.2, 0.1, 1.0})})
        for (double x : {-2.0, -0.3, 0.9, 3.3}) {
            const auto v = effective_potential(f, 1.1, x);
            const auto p = effective_decomposition(f, 1.1, x);
            CHECK(std::abs(p.re - v.real()) < 1e-12 * (1 + std::abs(v)));
            CHECK(std::abs(p.im - v.imag()) < 1e-12 * (1 + std::abs(v)));
        }
}

TEST_CASE("general effective potential reduces to the constrained form")
{
    // away from near-zeros of A+, where the differences lose accuracy
    const double E = 0.9;
    for (const auto& f : {CouplingFamily::oscillator({0.6, 2.0, 1.0, 1.0}),
                          CouplingFamily::rosen_morse({0.9, 0.3, 0.25, 0.8, 1.3}, 0.4)}) {
        auto err = [&](int n) {
            const auto g = GridSpec::symmetric(3.0, n);
            SampledCouplings s{g, {}, {}, {}};
            for (int i = 0; i < n; ++i) {
                const auto c = eval_couplings(f, g.x(i));
                s.M.push_back(c.M);
                s.P.push_back(c.P);
                s.Vt.push_back(constrained_vector(f, g.x(i)));
            }
            const auto v = general_effective_potential(s, E);
            double e = 0.0;
            for (int i = 2; i < n - 2; ++i)
                e = std::max(e, std::abs(v[i] - effective_potential(f, E, g.x(i))));
            return e;
        };
        const double e1 = err(301), e2 = err(601);
        CHECK(e1 < 1e-2);
        CHECK(e1 / e2 > 3.5);
    }
}

TEST_CASE("pure vector bracket")
{
    const auto g = GridSpec::symmetric(5.0, 201);
    std::vector<cplx> V(g.n), V0(g.n, cplx(0.7, 0.0));
    for (int i = 0; i < g.n; ++i)
        V[i] = 1.0 / std::cosh(g.x(i));
    const double E = 0.3;
    const auto b = pure_vector_effective(g, V, E);
    for (int i = 0; i < g.n; ++i)
        CHECK(std::abs(b[g.n - 1 - i] - std::conj(b[i])) < 1e-12);
    for (auto z : pure_vector_effective(g, V0, E))
        CHECK(std::abs(z + (E - 0.7) * (E - 0.7)) < 1e-14);
}

TEST_CASE("effective problem: energy dependence and domain")
{
    const auto po = EffectiveProblem::from_family(osc);
    CHECK_FALSE(po.energy_dependent());
    CHECK(po(1.0, 2.0) == po(1.0, -5.0));
    const auto pq = EffectiveProblem::from_family(CouplingFamily::quadratic({0.0, 0.0, 1.0}));
    CHECK(pq.energy_dependent());
    CHECK(pq.eigen_rhs(1.5) == doctest::Approx(2.25));

    const auto g = GridSpec::symmetric(2.0, 41);
    SampledCouplings s{g, std::vector<cplx>(41, 1.0), std::vector<cplx>(41, 0.0), std::vector<cplx>(41, 0.0)};
    const auto ps = EffectiveProblem::from_family(CouplingFamily::sampled(s));
    CHECK(std::abs(ps(0.5, 0.0) - 1.0) < 1e-14);
    CHECK_THROWS_AS(ps(2.5, 0.0), DomainError);
}

TEST_CASE("sqrt of A+ is continuous and squares back")
{
    const auto g = GridSpec::symmetric(6.0, 601);
    const auto r = sqrt_a_plus(rm, g);
    for (int i = 0; i < g.n; ++i) {
        const auto [ap, am] = a_plus_minus(rm, g.x(i));
        CHECK(std::abs(r[i] * r[i] - ap) < 1e-12 * (1 + std::abs(ap)));
        if (i > 0)
            CHECK(std::abs(r[i] - r[i - 1]) < 0.1);
        (void)am;
    }
}
