#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ptdirac/couplings.hpp"
#include "ptdirac/spinor.hpp"

namespace ptdirac {

enum class Provenance { ClosedForm, Oracle };

std::string to_string(Provenance p);

struct SpectrumState {
    int n = 0;
    double energy = 0.0;
    int branch = +1; // sign of E - v0
    bool valid = true;
    double residual = 0.0;
    Provenance provenance = Provenance::ClosedForm;
    /// Why a state is invalid (or other remarks); empty when nothing to say.
    std::string note;
};

struct Spectrum {
    std::optional<CouplingFamily> family;
    std::vector<SpectrumState> states;
    std::vector<std::string> diagnostics;

    /// Order by n, then branch (negative first).
    void sort();
    std::vector<SpectrumState> valid_states() const;
};

// ---- quadratic family --------------------------------------------------

/// Left minus right side of E^2 = -b1^2 + a2^2/Omega^2 + (2n+1) Omega with
/// Omega = sqrt(2 E a2 - 2 a1 b1). NaN when Omega^2 <= 0.
double quadratic_spectral_residual(const QuadraticParams& p, int n, double E);

/// E^3 - a2/2 - (2n+1) E sqrt(2 E a2), the b1 = 0 equation before squaring.
double quadratic_unsquared_residual(const QuadraticParams& p, int n, double E);

/// The two cube-root candidates of the squared b1 = 0 equation, (E+, E-).
std::pair<double, double> quadratic_b1zero_roots(double a2, int n);

Spectrum quadratic_spectrum(const CouplingFamily& fam, int n_max);

// ---- oscillator family -------------------------------------------------

struct OscillatorConstants {
    double omega = 0.0;     // sqrt(w2^2 - w1^2)
    double lambda = 0.0;    // signed (w1 m2 + w2 m1)/omega^2
    double lambda_sq = 0.0;
    double kappa = 0.0;     // w1 m1 + w2 m2
    double shift_imag = 0.0; // y = x + i shift_imag
    double sigma = 0.0;     // w1 + w2, A_+ = sigma (lambda + i y)
    double c = 0.0;         // lambda^2 omega
};

OscillatorConstants oscillator_constants(const CouplingFamily& fam);

/// |E_n - v0| = sqrt(omega (2n+1) + lambda^2 omega^2).
double oscillator_level(const CouplingFamily& fam, int n);

Spectrum oscillator_spectrum(const CouplingFamily& fam, int n_max);

/// DiracConsistent carries sqrt(w1 + w2) on psi_+ and its inverse on psi_-,
/// which is what the first-order system requires. AsPrinted uses
/// sqrt(omega) on both, which satisfies the system only when w1 + w2 = omega.
enum class SpinorForm { DiracConsistent, AsPrinted };

struct NormResult {
    double quadrature = 0.0;          // N from direct quadrature
    std::optional<double> closed_form; // n <= 1 only
    double rel_diff = 0.0;
};

/// Normalisation constant N of the n-th spinor, by quadrature of the
/// u-integrand and, for n = 0, 1, by the K0/K1/U closed forms.
NormResult oscillator_norm(const CouplingFamily& fam, int n, SpinorForm form = SpinorForm::DiracConsistent);

/// Closed-form N for n = 0, 1 (throws otherwise).
double oscillator_norm_closed(const CouplingFamily& fam, int n, SpinorForm form = SpinorForm::DiracConsistent);

/// The n = 0, 1 constants exactly as typeset in the original derivation,
/// e^{-c/2} prefactor and all. Kept so the mismatch stays documented.
double oscillator_norm_printed(const CouplingFamily& fam, int n);

/// Spinor on the real line of the shifted variable y. The grid runs over y;
/// the physical coordinate is x = y + contour_shift. N defaults to the
/// quadrature constant of `oscillator_norm`. For lambda = 0 the state is not
/// normalisable; N = 1 is used and tail_flag is set.
SpinorOnGrid oscillator_spinor(const CouplingFamily& fam, int n, int branch, const GridSpec& grid_y,
                               SpinorForm form = SpinorForm::DiracConsistent,
                               std::optional<double> norm_constant = std::nullopt);

// ---- Rosen-Morse family ------------------------------------------------

struct RosenMorseConstants {
    double u1_sq = 0.0;
    double u0_sq = 0.0;
    double omega_rm = 0.0; // M0 M1 + P0 P1
    double s = 0.0;
    double mu = 1.0;
};

RosenMorseConstants rosen_morse_constants(const CouplingFamily& fam);

struct RosenMorseLevel {
    int n = 0;
    double a = 0.0;
    double b = 0.0;
    double eps = 0.0;
    double radicand = 0.0;
};

RosenMorseLevel rosen_morse_level(const CouplingFamily& fam, int n);

Spectrum rosen_morse_spectrum(const CouplingFamily& fam);

struct RealityReport {
    int n_max = 0;
    double delta = 0.0;
    double omega_sq = 0.0;
    double mu4_delta4 = 0.0;
    bool omega_condition = false;
    double gap_lhs = 0.0; // U1^2 - U0^2
    double gap_rhs = 0.0; // mu^2 [(n_max+delta)^2 - delta^4/(n_max+delta)^2]
    bool gap_condition = false;
    bool satisfied = false;
    std::string summary;
};

RealityReport rosen_morse_reality_check(const CouplingFamily& fam, double rel_tol = 1e-9);

struct RosenMorseSpinorReport {
    SpinorOnGrid printed;          // the printed form, scaled to unit x-norm
    double residual = 0.0;         // on the given grid
    double residual_refined = 0.0; // on the refined grid
    double z_norm = 0.0;           // weighted z-form integral after scaling
    bool form_suspect = false;
    std::optional<SpinorOnGrid> oracle; // converged numerical eigenfunction
    double oracle_residual = 0.0;
    double oracle_energy = 0.0;
    double overlap = 0.0; // |<printed, oracle>| of unit-norm states
    std::string summary;
};

/// Printed-form spinor on an x-grid (z = tanh(mu x)) together with its
/// residual study and, when the form does not solve the system, the
/// numerically converged eigenfunction.
RosenMorseSpinorReport rosen_morse_spinor(const CouplingFamily& fam, int n, int branch, const GridSpec& grid);

} // namespace ptdirac
