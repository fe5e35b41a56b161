#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ptdirac/grid.hpp"

namespace ptdirac {

/// M = a0 x^2, P = i(a1 x^2 + b1), V~ = a2 x^2 with a0 = sqrt(a1^2 + a2^2).
struct QuadraticParams {
    double a1 = 0.0;
    double b1 = 0.0;
    double a2 = 0.0;
};

/// M = i w1 x + m1, P = w2 x + i m2, V~ = v0.
struct OscillatorParams {
    double omega1 = 0.0;
    double m1 = 0.0;
    double omega2 = 1.0;
    double m2 = 0.0;
};

/// M = i M1 tanh(mu x) + M0, P = P1 tanh(mu x) + i P0, V~ = v0.
struct RosenMorseParams {
    double M0 = 0.0;
    double M1 = 0.0;
    double P0 = 0.0;
    double P1 = 1.0;
    double mu = 1.0;
};

/// Tabulated couplings on one grid. When handed to operations that take
/// an unconstrained vector potential, Vt holds that full potential.
struct SampledCouplings {
    GridSpec grid;
    std::vector<cplx> M;
    std::vector<cplx> P;
    std::vector<cplx> Vt;
};

enum class FamilyTag { Quadratic, Oscillator, RosenMorse, GenericSampled };

std::string to_string(FamilyTag tag);

/// One of the complex (M, P, V~) coupling families. Invariants are checked
/// by the factories, so a constructed family is always usable.
class CouplingFamily {
public:
    static CouplingFamily quadratic(const QuadraticParams& p);
    static CouplingFamily oscillator(const OscillatorParams& p, double v0 = 0.0);
    static CouplingFamily rosen_morse(const RosenMorseParams& p, double v0 = 0.0);
    static CouplingFamily sampled(SampledCouplings s);

    FamilyTag tag() const noexcept;
    double v0() const noexcept { return v0_; }
    bool analytic() const noexcept { return tag() != FamilyTag::GenericSampled; }

    const QuadraticParams& quadratic_params() const;
    const OscillatorParams& oscillator_params() const;
    const RosenMorseParams& rosen_morse_params() const;
    const SampledCouplings& samples() const;

private:
    using Params = std::variant<QuadraticParams, OscillatorParams, RosenMorseParams, SampledCouplings>;
    CouplingFamily(Params p, double v0) : params_(std::move(p)), v0_(v0) {}

    Params params_;
    double v0_ = 0.0;
};

/// Positive root of the quartic-cancelling constraint a0^2 = a1^2 + a2^2.
double quadratic_a0(const QuadraticParams& p);

struct Couplings {
    cplx M;
    cplx P;
    cplx Vt;
};

/// Couplings with their first and second x-derivatives.
struct CouplingJet {
    cplx M, P, Vt;
    cplx dM, dP, dVt;
    cplx d2M, d2P;

    cplx a_plus() const noexcept { return M + cplx(0, 1) * P; }
    cplx a_minus() const noexcept { return M - cplx(0, 1) * P; }
    cplx da_plus() const noexcept { return dM + cplx(0, 1) * dP; }
    cplx d2a_plus() const noexcept { return d2M + cplx(0, 1) * d2P; }
};

Couplings eval_couplings(const CouplingFamily& fam, double x);

/// Analytic families accept complex x (used on shifted contours); sampled
/// families accept only real grid nodes.
CouplingJet coupling_jet(const CouplingFamily& fam, cplx x);

/// A_+ = M + iP and A_- = M - iP.
std::pair<cplx, cplx> a_plus_minus(const CouplingFamily& fam, double x);

/// Location of a zero of A_+ on the real axis, when one exists. The
/// constrained vector potential has a pole there.
std::optional<double> a_plus_real_zero(const CouplingFamily& fam);

/// Worst parity-rule violation per component. A PT-symmetric set has
/// Re M, Re V~, Im P even and Im M, Im V~, Re P odd.
struct PTReport {
    double re_m_even = 0.0;
    double im_m_odd = 0.0;
    double re_v_even = 0.0;
    double im_v_odd = 0.0;
    double re_p_odd = 0.0;
    double im_p_even = 0.0;
    double tol = 0.0;
    bool pass = true;

    double max_violation() const noexcept;
    /// Name of the worst component, empty when everything passes.
    std::string worst() const;
};

PTReport pt_check(const CouplingFamily& fam, const GridSpec& grid, double tol = 1e-10);

} // namespace ptdirac
