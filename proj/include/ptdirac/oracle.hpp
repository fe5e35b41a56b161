#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ptdirac/closedform.hpp"
#include "ptdirac/couplings.hpp"
#include "ptdirac/mapping.hpp"
#include "ptdirac/spinor.hpp"

namespace ptdirac {

// ---- Dirac matrix oracle -----------------------------------------------

/// First-derivative discretisation of the Dirac operator.
///  Stabilized: centered differences plus c h^3 sigma_1 (D2)^2, which pushes
///              the grid-scale (doubler) branch up to |E| ~ 16c/h while
///              keeping O(h^2) accuracy and hermiticity.
///  Centered:   plain centered differences; doublers are only filtered.
///  OneSided:   forward difference on psi_+, backward on psi_-. No doublers,
///              but O(h) and non-hermitian even for real couplings.
enum class Stencil { Stabilized, Centered, OneSided };

/// How the vector potential enters the matrix.
///  Direct:   V from the constraint, off-diagonal A_+ and A_-.
///  Absorbed: psi_+ = sqrt(A_+) phi_+, psi_- = phi_-/sqrt(A_+); diagonal V~,
///            off-diagonal 1 and A_+ A_-. Regular where A_+ vanishes.
///  Auto:     Absorbed if A_+ has a real zero inside the box, else Direct.
enum class VectorGauge { Auto, Direct, Absorbed };

std::string to_string(Stencil s);
std::string to_string(VectorGauge g);

struct DiracOptions {
    double window_lo = -std::numeric_limits<double>::infinity();
    double window_hi = std::numeric_limits<double>::infinity();
    double im_tol = 1e-6;        // accepted if |Im E| < im_tol (1 + |E|)
    double localization = 1e-4;  // max density fraction on the edge points
    double edge_fraction = 0.05; // share of grid points per side counted as edge
    double doubler_threshold = 0.5;
    Stencil stencil = Stencil::Stabilized;
    double stabilizer = 1.0 / 16.0;
    VectorGauge gauge = VectorGauge::Auto;
    /// Largest matrix dimension handed to the dense eigensolver. Its
    /// eigenvalues (from the full grid when it fits, else from a coarse copy)
    /// seed shift-invert refinement on the full grid.
    int dense_limit = 800;
};

/// Coefficients of the two lines
///   -i psi_+' + du psi_+ + cu psi_- = E psi_+
///    i psi_-' + dl psi_- + cl psi_+ = E psi_-
/// on every grid node. The end nodes carry the hard-box condition psi = 0.
struct DiracPotentials {
    GridSpec grid;
    std::vector<cplx> diag_upper;
    std::vector<cplx> diag_lower;
    std::vector<cplx> couple_upper;
    std::vector<cplx> couple_lower;
};

DiracPotentials direct_potentials(const CouplingFamily& fam, const GridSpec& grid);
DiracPotentials absorbed_potentials(const CouplingFamily& fam, const GridSpec& grid);
/// M, P and an unconstrained V given on the grid.
DiracPotentials literal_potentials(const GridSpec& grid, std::span<const cplx> M, std::span<const cplx> P,
                                   std::span<const cplx> V);

using PotentialBuilder = std::function<DiracPotentials(const GridSpec&)>;

VectorGauge resolve_gauge(const CouplingFamily& fam, const GridSpec& grid, VectorGauge g);
PotentialBuilder family_builder(const CouplingFamily& fam, VectorGauge resolved);

/// Interior operator as a dense column-major matrix of dimension 2(n-2),
/// unknowns interleaved (psi_+, psi_-) node by node.
std::vector<cplx> assemble_dense(const DiracPotentials& pots, Stencil stencil, double stabilizer = 1.0 / 16.0);

/// max |H - H^dagger| of the dense operator.
double hermiticity_defect(const DiracPotentials& pots, Stencil stencil, double stabilizer = 1.0 / 16.0);

/// Every eigenvalue of the dense operator (no filtering).
std::vector<cplx> dirac_eigenvalues(const DiracPotentials& pots, Stencil stencil, double stabilizer = 1.0 / 16.0);

struct DiracEigenpair {
    cplx energy;
    std::vector<cplx> psi_plus;  // full grid, zero at both ends
    std::vector<cplx> psi_minus;
    double edge_weight = 0.0;
    double alternation = 0.0;
    double residual = 0.0; // |H v - E v| / |v|
    int iterations = 0;
};

/// Shift-invert / Rayleigh-quotient refinement of the eigenpair nearest to
/// `guess`, on the banded operator.
DiracEigenpair refine_eigenpair(const DiracPotentials& pots, cplx guess, Stencil stencil,
                                double stabilizer = 1.0 / 16.0, double edge_fraction = 0.05);

Spectrum dirac_spectrum(const PotentialBuilder& build, const GridSpec& grid, const DiracOptions& opt,
                        double v0 = 0.0);
Spectrum dirac_spectrum(const CouplingFamily& fam, const GridSpec& grid, const DiracOptions& opt = {});

/// Weighted share of nearest-neighbour sign flips, in [0, 1]. Smooth states
/// sit near 0, grid-scale doublers near 1.
double alternation_fraction(std::span<const cplx> psi_plus, std::span<const cplx> psi_minus);

// ---- shooting on the effective equation --------------------------------

struct ShootOptions {
    int scan_points = 64;
    double match_fraction = 0.5; // match node as a fraction of the grid
    double accept = 1e-8;        // |m(E*)| relative to the bracket-edge scale
    double im_tol = 1e-6;        // |Im E*| < im_tol (1 + |E*|)
};

struct ShootResult {
    bool found = false;
    double energy = 0.0;
    double imag = 0.0;      // imaginary part of the root estimate
    double mismatch = 0.0;  // |m(E*)|
    double scale = 0.0;     // max |m| at the bracket edges
    int evaluations = 0;
    std::string message;
};

/// Normalised Wronskian mismatch of the left and right decaying solutions
/// at the match node, W/(|(chi_L, chi_L')| |(chi_R, chi_R')|).
cplx shooting_mismatch(const EffectiveProblem& prob, const GridSpec& grid, double E,
                       double match_fraction = 0.5);

ShootResult shoot_effective(const EffectiveProblem& prob, const GridSpec& grid, double E_lo, double E_hi,
                            const ShootOptions& opt = {});

/// Left and right solutions glued at the match node, scaled to max |chi| = 1.
std::vector<cplx> effective_eigenfunction(const EffectiveProblem& prob, const GridSpec& grid, double E,
                                          double match_fraction = 0.5);

// ---- fixed point for the energy-dependent quadratic problem -----------

struct FixedPointResult {
    double energy = 0.0;
    int iterations = 0;
    std::vector<double> trace;
};

/// E <- E + damping (E' - E) with E' the level-n energy of the effective
/// oscillator of frequency Omega(E). Throws NumericalError (trace in the
/// message) when Omega^2 turns non-positive or max_iter is exhausted.
FixedPointResult fixed_point_energy(const CouplingFamily& fam, int n, double E0, int max_iter = 200,
                                    double damping = 0.5, double tol = 1e-10);

// ---- norms and residuals -----------------------------------------------

/// int |psi_+|^2 + |psi_-|^2. Composite Simpson on X / ShiftedY grids;
/// midpoint rule with the (1 - z^2)^{-1} weight on TanhZ grids, whose nodes
/// sit half a step inside (-1, 1).
double quadrature_norm(const SpinorOnGrid& sp);

/// Density share carried by the outer `fraction` of nodes on each side.
double edge_fraction(const SpinorOnGrid& sp, double fraction = 0.05);

/// Max over interior nodes of both first-order equations, centered
/// differences, divided by the local magnitude sqrt(|psi_+|^2 + |psi_-|^2).
/// Nodes below 1e-6 of the peak magnitude are skipped.
double residual_check(const SpinorOnGrid& sp, const CouplingFamily& fam, double E);

} // namespace ptdirac
