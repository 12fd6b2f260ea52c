"""Steady flows of the 2D Euler equations on the rotating sphere.

Spectral tools (real spherical harmonics on Gauss grids), the contraction
construction of non-zonal steady states near ``beta Y_2^0 + gamma Y_1^0``,
a pseudo-spectral vorticity solver, and the linear rigidity diagnostics
near rigid rotation.
"""

__version__ = "0.1.0"

from .harmonics import (  # noqa: E402
    EVEN_COSINE,
    FULL,
    KernelObstructionError,
    MeanNotZeroError,
    ResolutionError,
    SpectralField,
    analyze,
    gauss_grid,
    jacobian,
    laplacian,
    synthesize,
)
from .steady import RHParams, construct  # noqa: E402

__all__ = [
    "EVEN_COSINE",
    "FULL",
    "KernelObstructionError",
    "MeanNotZeroError",
    "RHParams",
    "ResolutionError",
    "SpectralField",
    "analyze",
    "construct",
    "gauss_grid",
    "jacobian",
    "laplacian",
    "synthesize",
]
