"""Python access to the ptdirac core: closed forms, oracles and the CLI."""

from ._ptdirac import (
    DomainError,
    Error,
    Family,
    Grid,
    NumericalError,
    ParameterError,
    bessel_k,
    confluent_u,
    dirac_spectrum,
    hermite,
    jacobi,
    oscillator_level,
    oscillator_norm,
    oscillator_spinor,
    pt_violation,
    quadratic_b1zero_roots,
    rosen_morse_level,
    run,
    shoot,
    spectrum,
)

__all__ = [
    "DomainError",
    "Error",
    "Family",
    "Grid",
    "NumericalError",
    "ParameterError",
    "bessel_k",
    "confluent_u",
    "dirac_spectrum",
    "hermite",
    "jacobi",
    "oscillator_level",
    "oscillator_norm",
    "oscillator_spinor",
    "pt_violation",
    "quadratic_b1zero_roots",
    "rosen_morse_level",
    "run",
    "shoot",
    "spectrum",
]
