#pragma once

#include <vector>

#include "ptdirac/grid.hpp"

namespace ptdirac {

/// Which variable the sample grid runs over.
///  X: physical coordinate.
///  ShiftedY: real line of a complex-shifted coordinate, x = y + contour_shift.
///  TanhZ: z = tanh(mu x) on (-1, 1); norms carry the (1 - z^2)^-1 weight.
enum class SpinorVariable { X, ShiftedY, TanhZ };

struct SpinorOnGrid {
    GridSpec grid;
    std::vector<cplx> psi_plus;
    std::vector<cplx> psi_minus;
    double energy = 0.0;
    double norm = 0.0;

    SpinorVariable variable = SpinorVariable::X;
    cplx contour_shift{0.0, 0.0};
    /// Density still significant at the box walls (norm not converged).
    bool tail_flag = false;

    std::vector<double> density() const;
};

} // namespace ptdirac
