#include "ptdirac/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "ptdirac/errors.hpp"
#include "ptdirac/quadrature.hpp"

namespace ptdirac {

namespace {

constexpr cplx I{0.0, 1.0};

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

// LAPACK general band storage with room for the LU fill-in.
struct Band {
    int n = 0, kl = 0, ku = 0, ldab = 0;
    std::vector<cplx> ab;

    Band(int n_, int kl_, int ku_) : n(n_), kl(kl_), ku(ku_), ldab(2 * kl_ + ku_ + 1), ab(std::size_t(ldab) * n_) {}

    cplx& at(int i, int j) { return ab[std::size_t(kl + ku + i - j) + std::size_t(j) * ldab]; }
    cplx at(int i, int j) const { return ab[std::size_t(kl + ku + i - j) + std::size_t(j) * ldab]; }

    void matvec(const std::vector<cplx>& x, std::vector<cplx>& y) const
    {
        y.assign(n, cplx{});
        for (int j = 0; j < n; ++j) {
            const int i0 = std::max(0, j - ku), i1 = std::min(n - 1, j + kl);
            for (int i = i0; i <= i1; ++i)
                y[i] += at(i, j) * x[j];
        }
    }
};

int bandwidth(Stencil st)
{
    return st == Stencil::Stabilized ? 5 : 2;
}

// Interior unknowns interleaved: psi_+ at node j -> 2(j-1), psi_- -> 2(j-1)+1.
template <class Add>
void assemble(const DiracPotentials& p, Stencil st, double c, Add&& add)
{
    const int n = p.grid.n;
    const double h = p.grid.h();
    auto up = [](int j) { return 2 * (j - 1); };
    auto lo = [](int j) { return 2 * (j - 1) + 1; };
    auto inside = [n](int k) { return k >= 1 && k <= n - 2; };

    for (int j = 1; j <= n - 2; ++j) {
        add(up(j), up(j), p.diag_upper[j]);
        add(up(j), lo(j), p.couple_upper[j]);
        add(lo(j), lo(j), p.diag_lower[j]);
        add(lo(j), up(j), p.couple_lower[j]);
        if (st == Stencil::OneSided) {
            // -i (f_{j+1} - f_j)/h on psi_+, i (f_j - f_{j-1})/h on psi_-
            add(up(j), up(j), I / h);
            if (inside(j + 1))
                add(up(j), up(j + 1), -I / h);
            add(lo(j), lo(j), I / h);
            if (inside(j - 1))
                add(lo(j), lo(j - 1), -I / h);
        } else {
            const cplx d = I / (2.0 * h);
            if (inside(j + 1)) {
                add(up(j), up(j + 1), -d);
                add(lo(j), lo(j + 1), d);
            }
            if (inside(j - 1)) {
                add(up(j), up(j - 1), d);
                add(lo(j), lo(j - 1), -d);
            }
        }
        if (st == Stencil::Stabilized) {
            // c h^3 (D2)^2 = (c/h) [1 -4 6 -4 1] on both off-diagonal blocks
            static constexpr double w5[5] = {1.0, -4.0, 6.0, -4.0, 1.0};
            const double w = c / h;
            for (int o = -2; o <= 2; ++o) {
                const int k = j + o;
                if (!inside(k))
                    continue;
                add(up(j), lo(k), cplx(w * w5[o + 2]));
                add(lo(j), up(k), cplx(w * w5[o + 2]));
            }
        }
    }
}

void check_pots(const DiracPotentials& p)
{
    p.grid.validate();
    const auto n = static_cast<std::size_t>(p.grid.n);
    if (p.diag_upper.size() != n || p.diag_lower.size() != n || p.couple_upper.size() != n ||
        p.couple_lower.size() != n)
        throw ParameterError("DiracPotentials: arrays must match the grid");
}

struct DenseEig {
    std::vector<cplx> values;
    std::vector<cplx> vectors; // column-major, may be empty
};

DenseEig dense_eig(const DiracPotentials& p, Stencil st, double c, bool want_vectors)
{
    auto a = assemble_dense(p, st, c);
    const int dim = 2 * (p.grid.n - 2);
    DenseEig out;
    out.values.resize(dim);
    if (want_vectors)
        out.vectors.resize(std::size_t(dim) * dim);
    const lapack_int info =
        LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', want_vectors ? 'V' : 'N', dim, a.data(), dim, out.values.data(),
                      nullptr, 1, want_vectors ? out.vectors.data() : nullptr, dim);
    if (info != 0)
        throw NumericalError("dirac eigensolver: zgeev failed to converge (info " + std::to_string(info) + ")");
    return out;
}

// Full-grid components from an interior vector.
void unpack(const std::vector<cplx>& v, int n, std::vector<cplx>& pp, std::vector<cplx>& pm)
{
    pp.assign(n, cplx{});
    pm.assign(n, cplx{});
    for (int j = 1; j <= n - 2; ++j) {
        pp[j] = v[2 * (j - 1)];
        pm[j] = v[2 * (j - 1) + 1];
    }
    // fix the overall phase: largest entry real and positive
    double big = 0.0;
    cplx ref{1.0, 0.0};
    for (int j = 0; j < n; ++j)
        for (const cplx& z : {pp[j], pm[j]})
            if (std::abs(z) > big) {
                big = std::abs(z);
                ref = z;
            }
    if (big > 0.0) {
        const cplx s = std::conj(ref) / (big * big);
        for (int j = 0; j < n; ++j) {
            pp[j] *= s;
            pm[j] *= s;
        }
    }
}

double edge_weight(const std::vector<cplx>& pp, const std::vector<cplx>& pm, double fraction)
{
    const int n = static_cast<int>(pp.size());
    const int ne = std::max(1, static_cast<int>(std::lround(fraction * n)));
    double tot = 0.0, edge = 0.0;
    for (int j = 0; j < n; ++j) {
        const double d = std::norm(pp[j]) + std::norm(pm[j]);
        tot += d;
        if (j < ne || j >= n - ne)
            edge += d;
    }
    return tot > 0.0 ? edge / tot : 1.0;
}

double vnorm(const std::vector<cplx>& v)
{
    double s = 0.0;
    for (const auto& z : v)
        s += std::norm(z);
    return std::sqrt(s);
}

cplx vdot(const std::vector<cplx>& a, const std::vector<cplx>& b)
{
    cplx s{};
    for (std::size_t i = 0; i < a.size(); ++i)
        s += std::conj(a[i]) * b[i];
    return s;
}

} // namespace

std::string to_string(Stencil s)
{
    switch (s) {
    case Stencil::Stabilized: return "stabilized";
    case Stencil::Centered: return "centered";
    case Stencil::OneSided: return "one_sided";
    }
    return "unknown";
}

std::string to_string(VectorGauge g)
{
    switch (g) {
    case VectorGauge::Auto: return "auto";
    case VectorGauge::Direct: return "direct";
    case VectorGauge::Absorbed: return "absorbed";
    }
    return "unknown";
}

DiracPotentials direct_potentials(const CouplingFamily& fam, const GridSpec& grid)
{
    grid.validate();
    DiracPotentials p{grid, {}, {}, {}, {}};
    p.diag_upper.resize(grid.n);
    p.couple_upper.resize(grid.n);
    p.couple_lower.resize(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.x(i);
        const auto j = coupling_jet(fam, cplx(x, 0.0));
        p.diag_upper[i] = constrained_vector(fam, x);
        p.couple_upper[i] = j.a_plus();
        p.couple_lower[i] = j.a_minus();
    }
    p.diag_lower = p.diag_upper;
    return p;
}

DiracPotentials absorbed_potentials(const CouplingFamily& fam, const GridSpec& grid)
{
    grid.validate();
    DiracPotentials p{grid, {}, {}, {}, {}};
    p.diag_upper.resize(grid.n);
    p.couple_upper.assign(grid.n, cplx(1.0, 0.0));
    p.couple_lower.resize(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const auto j = coupling_jet(fam, cplx(grid.x(i), 0.0));
        p.diag_upper[i] = j.Vt;
        p.couple_lower[i] = j.M * j.M + j.P * j.P;
    }
    p.diag_lower = p.diag_upper;
    return p;
}

DiracPotentials literal_potentials(const GridSpec& grid, std::span<const cplx> M, std::span<const cplx> P,
                                   std::span<const cplx> V)
{
    grid.validate();
    const auto n = static_cast<std::size_t>(grid.n);
    if (M.size() != n || P.size() != n || V.size() != n)
        throw ParameterError("literal_potentials: arrays must match the grid");
    DiracPotentials p{grid, {V.begin(), V.end()}, {V.begin(), V.end()}, {}, {}};
    p.couple_upper.resize(n);
    p.couple_lower.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        p.couple_upper[i] = M[i] + I * P[i];
        p.couple_lower[i] = M[i] - I * P[i];
    }
    return p;
}

VectorGauge resolve_gauge(const CouplingFamily& fam, const GridSpec& grid, VectorGauge g)
{
    if (g != VectorGauge::Auto)
        return g;
    const auto z = a_plus_real_zero(fam);
    if (z && *z >= grid.x_min && *z <= grid.x_max)
        return VectorGauge::Absorbed;
    if (z && -*z >= grid.x_min && -*z <= grid.x_max)
        return VectorGauge::Absorbed;
    return VectorGauge::Direct;
}

PotentialBuilder family_builder(const CouplingFamily& fam, VectorGauge resolved)
{
    if (resolved == VectorGauge::Absorbed)
        return [fam](const GridSpec& g) { return absorbed_potentials(fam, g); };
    return [fam](const GridSpec& g) { return direct_potentials(fam, g); };
}

std::vector<cplx> assemble_dense(const DiracPotentials& pots, Stencil stencil, double stabilizer)
{
    check_pots(pots);
    const int dim = 2 * (pots.grid.n - 2);
    std::vector<cplx> a(std::size_t(dim) * dim);
    assemble(pots, stencil, stabilizer, [&](int i, int j, cplx v) { a[std::size_t(i) + std::size_t(j) * dim] += v; });
    return a;
}

double hermiticity_defect(const DiracPotentials& pots, Stencil stencil, double stabilizer)
{
    const auto a = assemble_dense(pots, stencil, stabilizer);
    const int dim = 2 * (pots.grid.n - 2);
    double worst = 0.0;
    for (int j = 0; j < dim; ++j)
        for (int i = 0; i < dim; ++i)
            worst = std::max(worst, std::abs(a[i + std::size_t(j) * dim] - std::conj(a[j + std::size_t(i) * dim])));
    return worst;
}

std::vector<cplx> dirac_eigenvalues(const DiracPotentials& pots, Stencil stencil, double stabilizer)
{
    return dense_eig(pots, stencil, stabilizer, false).values;
}

DiracEigenpair refine_eigenpair(const DiracPotentials& pots, cplx guess, Stencil stencil, double stabilizer,
                                double edge_frac)
{
    check_pots(pots);
    const int n = pots.grid.n;
    const int dim = 2 * (n - 2);
    const int bw = bandwidth(stencil);
    Band A(dim, bw, bw);
    assemble(pots, stencil, stabilizer, [&](int i, int j, cplx v) { A.at(i, j) += v; });

    Band F = A;
    std::vector<lapack_int> piv(dim);
    auto factor = [&](cplx s) {
        F = A;
        for (int i = 0; i < dim; ++i)
            F.at(i, i) -= s;
        return LAPACKE_zgbtrf(LAPACK_COL_MAJOR, dim, dim, bw, bw, F.ab.data(), F.ldab, piv.data()) == 0;
    };
    auto solve = [&](std::vector<cplx>& b) {
        const lapack_int info =
            LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', dim, bw, bw, 1, F.ab.data(), F.ldab, piv.data(), b.data(), dim);
        if (info != 0)
            throw NumericalError("refine_eigenpair: banded solve failed");
    };

    // deterministic start vector
    std::vector<cplx> v(dim), w(dim), av(dim);
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;
    for (auto& z : v) {
        seed = seed * 6364136223846793005ull + 1442695040888963407ull;
        const double a = double(seed >> 11) * 0x1.0p-53;
        z = std::polar(1.0, 2.0 * 3.141592653589793 * a);
    }
    double nv = vnorm(v);
    for (auto& z : v)
        z /= nv;

    cplx sigma = guess;
    for (int k = 0; k < 5 && !factor(sigma); ++k)
        sigma += 1e-10 * (1.0 + std::abs(sigma));
    // a few fixed-shift steps select the eigenvalue nearest the guess
    for (int k = 0; k < 4; ++k) {
        w = v;
        solve(w);
        nv = vnorm(w);
        for (int i = 0; i < dim; ++i)
            v[i] = w[i] / nv;
    }
    A.matvec(v, av);
    cplx lam = vdot(v, av);
    int it = 0;
    double res = 0.0;
    for (; it < 40; ++it) {
        if (!factor(lam))
            break; // lam is an eigenvalue to working precision
        w = v;
        solve(w);
        nv = vnorm(w);
        for (int i = 0; i < dim; ++i)
            v[i] = w[i] / nv;
        A.matvec(v, av);
        const cplx next = vdot(v, av);
        res = 0.0;
        for (int i = 0; i < dim; ++i)
            res += std::norm(av[i] - next * v[i]);
        res = std::sqrt(res);
        const bool done = std::abs(next - lam) < 1e-14 * (1.0 + std::abs(lam)) || res < 1e-12 * (1.0 + std::abs(lam));
        lam = next;
        if (done)
            break;
    }
    A.matvec(v, av);
    res = 0.0;
    for (int i = 0; i < dim; ++i)
        res += std::norm(av[i] - lam * v[i]);

    DiracEigenpair out;
    out.energy = lam;
    out.residual = std::sqrt(res);
    out.iterations = it;
    unpack(v, n, out.psi_plus, out.psi_minus);
    out.edge_weight = edge_weight(out.psi_plus, out.psi_minus, edge_frac);
    out.alternation = alternation_fraction(out.psi_plus, out.psi_minus);
    return out;
}

double alternation_fraction(std::span<const cplx> pp, std::span<const cplx> pm)
{
    double num = 0.0, den = 0.0;
    for (auto comp : {pp, pm})
        for (std::size_t i = 0; i + 1 < comp.size(); ++i) {
            const cplx c = std::conj(comp[i]) * comp[i + 1];
            num += std::max(0.0, -c.real());
            den += std::abs(c);
        }
    return den > 0.0 ? num / den : 0.0;
}

Spectrum dirac_spectrum(const PotentialBuilder& build, const GridSpec& grid, const DiracOptions& opt, double v0)
{
    grid.validate();
    if (!(opt.window_lo <= opt.window_hi))
        return {};
    const auto pots = build(grid);
    check_pots(pots);
    const int dim = 2 * (grid.n - 2);

    Spectrum sp;
    std::vector<cplx> cands;
    const bool direct = dim <= opt.dense_limit;
    const GridSpec coarse = direct ? grid : GridSpec::uniform(grid.x_min, grid.x_max, opt.dense_limit / 2 + 1);
    {
        const auto cp = direct ? pots : build(coarse);
        const auto vals = dense_eig(cp, opt.stencil, opt.stabilizer, false).values;
        for (const cplx& e : vals) {
            // loose screening here, strict tests after refinement
            const double margin = direct ? 1e-9 : 0.05 * (1.0 + std::abs(e));
            if (e.real() < opt.window_lo - margin || e.real() > opt.window_hi + margin)
                continue;
            const double im_lim = direct ? 10.0 * opt.im_tol : 0.05;
            if (std::abs(e.imag()) > im_lim * (1.0 + std::abs(e)))
                continue;
            cands.push_back(e);
        }
        std::sort(cands.begin(), cands.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
        sp.diagnostics.push_back(std::to_string(cands.size()) + " candidates from a " + std::to_string(coarse.n) +
                                 "-point dense solve, refined by shift-invert on " + std::to_string(grid.n) +
                                 " points");
    }

    std::vector<DiracEigenpair> found;
    int rejected[4] = {0, 0, 0, 0};
    for (const cplx c : cands) {
        const DiracEigenpair ep = refine_eigenpair(pots, c, opt.stencil, opt.stabilizer, opt.edge_fraction);
        const double E = ep.energy.real();
        int why = -1;
        if (std::abs(ep.energy.imag()) > opt.im_tol * (1.0 + std::abs(E)))
            why = 0;
        else if (ep.edge_weight > opt.localization)
            why = 1;
        else if (ep.alternation > opt.doubler_threshold)
            why = 2;
        else if (E < opt.window_lo || E > opt.window_hi)
            why = 3;
        if (why >= 0) {
            ++rejected[why];
            continue;
        }
        const bool dup = std::any_of(found.begin(), found.end(), [&](const DiracEigenpair& f) {
            return std::abs(f.energy - ep.energy) < 1e-9 * (1.0 + std::abs(E));
        });
        if (!dup)
            found.push_back(ep);
    }
    static const char* reason[4] = {"complex energy", "edge weight above localization threshold",
                                    "sign alternation (doubler)", "outside window"};
    for (int k = 0; k < 4; ++k)
        if (rejected[k])
            sp.diagnostics.push_back("rejected " + std::to_string(rejected[k]) + ": " + reason[k]);

    // number the levels on each branch by distance from v0
    std::vector<int> order(found.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(found[a].energy.real() - v0) < std::abs(found[b].energy.real() - v0);
    });
    int count[2] = {0, 0};
    for (int idx : order) {
        const auto& ep = found[idx];
        SpectrumState st;
        st.energy = ep.energy.real();
        st.branch = st.energy >= v0 ? +1 : -1;
        st.n = count[st.branch > 0]++;
        st.valid = true;
        st.residual = std::abs(ep.energy.imag());
        st.provenance = Provenance::Oracle;
        st.note = "edge " + fmt(ep.edge_weight) + ", alternation " + fmt(ep.alternation);
        sp.states.push_back(st);
    }
    sp.sort();
    return sp;
}

Spectrum dirac_spectrum(const CouplingFamily& fam, const GridSpec& grid, const DiracOptions& opt)
{
    const auto g = resolve_gauge(fam, grid, opt.gauge);
    auto sp = dirac_spectrum(family_builder(fam, g), grid, opt, fam.v0());
    sp.family = fam;
    sp.diagnostics.insert(sp.diagnostics.begin(), "gauge " + to_string(g) + ", stencil " + to_string(opt.stencil));
    return sp;
}

// ---- shooting ----------------------------------------------------------

namespace {

struct Side {
    cplx chi, dchi;
};

// RK4 for chi'' = q chi from node `from` to node `to`, starting on the
// decaying branch. Optionally records chi on the visited nodes.
Side integrate(const EffectiveProblem& prob, const GridSpec& g, double E, int from, int to,
               std::vector<cplx>* rec)
{
    const double rhs = prob.eigen_rhs(E);
    auto q = [&](double x) { return prob(x, E) - rhs; };
    const int dir = to > from ? 1 : -1;
    const double hs = dir * g.h();
    double x = g.x(from);
    cplx q0 = q(x);
    const cplx kappa = std::sqrt(q0);
    if (!(kappa.real() > 1e-12 * std::abs(kappa)))
        throw PreconditionError("shooting: no decaying solution at x = " + fmt(x) + " for E = " + fmt(E) +
                                " (V_eff - E^2 = " + fmt(q0.real()) + (q0.imag() < 0 ? "" : "+") + fmt(q0.imag()) +
                                "i)");
    cplx y0 = 1.0, y1 = dir > 0 ? kappa : -kappa;
    if (rec)
        (*rec)[from] = y0;
    for (int k = from; k != to; k += dir) {
        const cplx qm = q(x + 0.5 * hs);
        const cplx q1 = q(x + hs);
        const cplx k1a = y1, k1b = q0 * y0;
        const cplx k2a = y1 + 0.5 * hs * k1b, k2b = qm * (y0 + 0.5 * hs * k1a);
        const cplx k3a = y1 + 0.5 * hs * k2b, k3b = qm * (y0 + 0.5 * hs * k2a);
        const cplx k4a = y1 + hs * k3b, k4b = q1 * (y0 + hs * k3a);
        y0 += hs / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
        y1 += hs / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
        x = g.x(k + dir);
        q0 = q1;
        const double mag = std::abs(y0) + std::abs(y1);
        if (mag > 1e150) {
            y0 /= mag;
            y1 /= mag;
            if (rec)
                for (int i = from; i != k + dir; i += dir)
                    (*rec)[i] /= mag;
        }
        if (rec)
            (*rec)[k + dir] = y0;
    }
    return {y0, y1};
}

int match_node(const GridSpec& g, double frac)
{
    return std::clamp(static_cast<int>(std::lround(frac * (g.n - 1))), 1, g.n - 2);
}

} // namespace

cplx shooting_mismatch(const EffectiveProblem& prob, const GridSpec& grid, double E, double match_fraction)
{
    grid.validate();
    const int m = match_node(grid, match_fraction);
    const Side L = integrate(prob, grid, E, 0, m, nullptr);
    const Side R = integrate(prob, grid, E, grid.n - 1, m, nullptr);
    const cplx W = L.chi * R.dchi - L.dchi * R.chi;
    const double nl = std::hypot(std::abs(L.chi), std::abs(L.dchi));
    const double nr = std::hypot(std::abs(R.chi), std::abs(R.dchi));
    return W / (nl * nr);
}

ShootResult shoot_effective(const EffectiveProblem& prob, const GridSpec& grid, double E_lo, double E_hi,
                            const ShootOptions& opt)
{
    grid.validate();
    if (!(E_lo < E_hi))
        throw ParameterError("shoot_effective: need E_lo < E_hi");
    ShootResult r;
    auto m = [&](double E) {
        ++r.evaluations;
        return shooting_mismatch(prob, grid, E, opt.match_fraction);
    };
    const int K = std::max(opt.scan_points, 3);
    std::vector<double> es(K), am(K);
    for (int k = 0; k < K; ++k) {
        es[k] = E_lo + (E_hi - E_lo) * k / (K - 1);
        am[k] = std::abs(m(es[k]));
    }
    r.scale = std::max(am.front(), am.back());

    std::vector<int> mins;
    for (int k = 0; k < K; ++k) {
        const bool l = k == 0 || am[k] <= am[k - 1];
        const bool rr = k == K - 1 || am[k] <= am[k + 1];
        if (l && rr)
            mins.push_back(k);
    }
    std::sort(mins.begin(), mins.end(), [&](int a, int b) { return am[a] < am[b]; });

    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double best = std::numeric_limits<double>::infinity();
    for (int k : mins) {
        // golden section on |m| over the neighbouring scan cells
        double a = es[std::max(k - 1, 0)], b = es[std::min(k + 1, K - 1)];
        double c = b - gr * (b - a), d = a + gr * (b - a);
        double fc = std::abs(m(c)), fd = std::abs(m(d));
        for (int it = 0; it < 60 && (b - a) > 1e-12 * (1.0 + std::abs(a)); ++it) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = std::abs(m(c));
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = std::abs(m(d));
            }
        }
        // secant on the complex mismatch along the real axis
        double e0 = 0.5 * (a + b);
        double e1 = e0 + 1e-7 * (E_hi - E_lo);
        cplx m0 = m(e0), m1 = m(e1);
        double imag = 0.0;
        for (int it = 0; it < 40; ++it) {
            if (m1 == m0)
                break;
            const cplx step = m1 * (e1 - e0) / (m1 - m0);
            imag = -step.imag();
            const double e2 = e1 - step.real();
            if (!std::isfinite(e2) || e2 < E_lo - (E_hi - E_lo) || e2 > E_hi + (E_hi - E_lo))
                break;
            e0 = e1;
            m0 = m1;
            e1 = e2;
            m1 = m(e1);
            if (std::abs(e1 - e0) < 1e-15 * (1.0 + std::abs(e1)))
                break;
        }
        const double mis = std::abs(m1);
        const bool ok = e1 >= E_lo && e1 <= E_hi && mis <= opt.accept * r.scale &&
                        std::abs(imag) <= opt.im_tol * (1.0 + std::abs(e1));
        if (ok && mis < best) {
            best = mis;
            r.found = true;
            r.energy = e1;
            r.imag = imag;
            r.mismatch = mis;
        }
        if (r.found)
            break;
    }
    if (!r.found)
        r.message = "no acceptable mismatch minimum in [" + fmt(E_lo) + ", " + fmt(E_hi) + "]";
    return r;
}

std::vector<cplx> effective_eigenfunction(const EffectiveProblem& prob, const GridSpec& grid, double E,
                                          double match_fraction)
{
    grid.validate();
    const int m = match_node(grid, match_fraction);
    std::vector<cplx> left(grid.n), right(grid.n);
    integrate(prob, grid, E, 0, m, &left);
    integrate(prob, grid, E, grid.n - 1, m, &right);
    if (std::abs(right[m]) == 0.0)
        throw NumericalError("effective_eigenfunction: right solution vanishes at the match node");
    const cplx s = left[m] / right[m];
    std::vector<cplx> chi(grid.n);
    for (int i = 0; i <= m; ++i)
        chi[i] = left[i];
    for (int i = m + 1; i < grid.n; ++i)
        chi[i] = s * right[i];
    int ipk = 0;
    for (int i = 1; i < grid.n; ++i)
        if (std::abs(chi[i]) > std::abs(chi[ipk]))
            ipk = i;
    const cplx ref = chi[ipk];
    for (auto& z : chi)
        z /= ref;
    return chi;
}

// ---- fixed point -------------------------------------------------------

FixedPointResult fixed_point_energy(const CouplingFamily& fam, int n, double E0, int max_iter, double damping,
                                    double tol)
{
    const auto& p = fam.quadratic_params();
    if (n < 0)
        throw ParameterError("fixed_point_energy: n must be >= 0");
    FixedPointResult r;
    double E = E0;
    r.trace.push_back(E);
    auto dump = [&r] {
        std::ostringstream os;
        os << "trace:";
        for (double t : r.trace)
            os << ' ' << fmt(t);
        return os.str();
    };
    for (int it = 1; it <= max_iter; ++it) {
        const double om2 = 2.0 * E * p.a2 - 2.0 * p.a1 * p.b1;
        if (!(om2 > 0.0))
            throw NumericalError("fixed_point_energy: Omega^2 = " + fmt(om2) + " <= 0 at E = " + fmt(E) + "; " + dump());
        const double om = std::sqrt(om2);
        const double e2 = -p.b1 * p.b1 + p.a2 * p.a2 / om2 + (2.0 * n + 1.0) * om;
        if (!(e2 >= 0.0))
            throw NumericalError("fixed_point_energy: level energy squared negative at E = " + fmt(E) + "; " + dump());
        const double target = (E >= 0 ? 1.0 : -1.0) * std::sqrt(e2);
        const double next = E + damping * (target - E);
        r.trace.push_back(next);
        r.iterations = it;
        if (!std::isfinite(next))
            throw NumericalError("fixed_point_energy: diverged; " + dump());
        if (std::abs(next - E) < tol) {
            r.energy = next;
            return r;
        }
        E = next;
    }
    throw NumericalError("fixed_point_energy: no convergence in " + std::to_string(max_iter) + " steps; " + dump());
}

// ---- norms and residuals -----------------------------------------------

double quadrature_norm(const SpinorOnGrid& sp)
{
    const auto n = static_cast<std::size_t>(sp.grid.n);
    if (sp.psi_plus.size() != n || sp.psi_minus.size() != n)
        throw ParameterError("quadrature_norm: component arrays must match the grid");
    auto d = sp.density();
    for (double v : d)
        if (!std::isfinite(v))
            throw NumericalError("quadrature_norm: non-finite spinor value");
    if (sp.variable == SpinorVariable::TanhZ) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = sp.grid.x(static_cast<int>(i));
            if (!(std::abs(z) < 1.0))
                throw DomainError("quadrature_norm: z-grid must stay inside (-1, 1)");
            s += d[i] / (1.0 - z * z);
        }
        return s * sp.grid.h();
    }
    return quad::simpson(d, sp.grid.h());
}

double edge_fraction(const SpinorOnGrid& sp, double fraction)
{
    return edge_weight(sp.psi_plus, sp.psi_minus, fraction);
}

double residual_check(const SpinorOnGrid& sp, const CouplingFamily& fam, double E)
{
    const int n = sp.grid.n;
    if (sp.psi_plus.size() != std::size_t(n) || sp.psi_minus.size() != std::size_t(n))
        throw ParameterError("residual_check: component arrays must match the grid");
    if (sp.variable == SpinorVariable::TanhZ)
        throw PreconditionError("residual_check: needs an x or shifted-y grid");
    const double h = sp.grid.h();
    double peak = 0.0;
    std::vector<double> mag(n);
    for (int i = 0; i < n; ++i) {
        mag[i] = std::sqrt(std::norm(sp.psi_plus[i]) + std::norm(sp.psi_minus[i]));
        peak = std::max(peak, mag[i]);
    }
    double worst = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
        if (mag[i] < 1e-6 * peak)
            continue;
        const cplx x = sp.grid.x(i) + sp.contour_shift;
        const auto j = coupling_jet(fam, x);
        const cplx V = 0.5 * I * j.da_plus() / j.a_plus() + j.Vt;
        const cplx dp = (sp.psi_plus[i + 1] - sp.psi_plus[i - 1]) / (2.0 * h);
        const cplx dm = (sp.psi_minus[i + 1] - sp.psi_minus[i - 1]) / (2.0 * h);
        const cplx r1 = -I * dp + j.a_plus() * sp.psi_minus[i] + (V - E) * sp.psi_plus[i];
        const cplx r2 = I * dm + j.a_minus() * sp.psi_plus[i] + (V - E) * sp.psi_minus[i];
        worst = std::max(worst, std::max(std::abs(r1), std::abs(r2)) / mag[i]);
    }
    return worst;
}

} // namespace ptdirac
