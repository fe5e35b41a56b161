#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ptdirac/couplings.hpp"
#include "ptdirac/spinor.hpp"

namespace ptdirac {

/// Vector potential obeying V = (i/2) A_+'/A_+ + V~. Throws SingularityError
/// where A_+ vanishes.
cplx constrained_vector(const CouplingFamily& fam, double x);
cplx constrained_vector(const CouplingFamily& fam, cplx x);

/// Effective potential of the constrained problem,
///   V_eff = M^2 + P^2 - V~^2 + 2 E V~ - i V~',
/// so that -chi'' + V_eff chi = E^2 chi.
cplx effective_potential(const CouplingFamily& fam, double E, double x);
cplx effective_potential(const CouplingFamily& fam, double E, cplx x);

struct EffectiveParts {
    double re = 0.0;
    double im = 0.0;
};

/// Real and imaginary parts of V_eff written through the real and imaginary
/// parts of M, P and V~.
EffectiveParts effective_decomposition(const CouplingFamily& fam, double E, double x);

/// Effective potential for an arbitrary (unconstrained) vector potential.
/// `s.Vt` is read as the full V. Derivatives are finite differences.
std::vector<cplx> general_effective_potential(const SampledCouplings& s, double E);

/// Bracket of -psi_+'' + [ -i V' - (E - V)^2 ] psi_+ = 0, the upper-component
/// equation when scalar and pseudoscalar couplings are absent.
std::vector<cplx> pure_vector_effective(const GridSpec& grid, std::span<const cplx> V, double E);

/// Schrodinger-side problem -chi'' + U(x, E) chi = (E - v0)^2 chi.
///
/// For a constant V~ = v0 the E-dependence of V_eff is exactly 2 E v0 - v0^2,
/// which is moved to the right-hand side; U then ignores E and
/// `energy_dependent()` is false. Otherwise U is the full V_eff and v0 = 0.
class EffectiveProblem {
public:
    using Potential = std::function<cplx(double x, double E)>;

    EffectiveProblem(Potential u, bool energy_dependent, double v0 = 0.0,
                     std::optional<GridSpec> domain = std::nullopt);

    static EffectiveProblem from_family(const CouplingFamily& fam);

    cplx operator()(double x, double E) const { return u_(x, E); }
    bool energy_dependent() const noexcept { return energy_dependent_; }
    double v0() const noexcept { return v0_; }
    /// Sample grid for tabulated problems; empty means analytic on the line.
    const std::optional<GridSpec>& domain() const noexcept { return domain_; }

    /// Right-hand side eigenvalue (E - v0)^2.
    double eigen_rhs(double E) const noexcept { return (E - v0_) * (E - v0_); }

private:
    Potential u_;
    bool energy_dependent_ = false;
    double v0_ = 0.0;
    std::optional<GridSpec> domain_;
};

/// Square root of A_+ along the grid, principal branch at the first node
/// and continued by phase unwrapping.
std::vector<cplx> sqrt_a_plus(const CouplingFamily& fam, const GridSpec& grid, cplx shift = {});

/// psi_+ = sqrt(A_+) chi and psi_- = (i psi_+' + B psi_+)/A_+ with
/// B = E - V. The norm is filled in by composite Simpson quadrature.
SpinorOnGrid reconstruct_spinor(std::span<const cplx> chi, const CouplingFamily& fam, double E,
                                const GridSpec& grid);

} // namespace ptdirac
