"""Sobolev and Gevrey norms of spectral fields.

With ``lambda_n = n(n+1)`` and ``mu_n = lambda_n + 1``::

    ||u||_{H^k}^2      = sum mu_n^k |u_n^m|^2
    ||u||_{Hdot^k}^2   = sum_{n>=1} lambda_n^k |u_n^m|^2
    ||u||_{G_lam,k}^2  = sum mu_n^k exp(2 lam sqrt(mu_n)) |u_n^m|^2

The Gevrey sum includes the ``n = 0`` mode so that ``G_0`` coincides with
``H^k`` for every field.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gaunt import expand_product
from .harmonics import MeanNotZeroError, degree_of

__all__ = [
    "GevreySpec",
    "algebra_defect",
    "analyticity_profile",
    "gevrey_norm",
    "homogeneous_sobolev_norm",
    "norm_table",
    "sobolev_norm",
]


@dataclass(frozen=True)
class GevreySpec:
    lam: float = 0.0
    k: float = 2.0

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("analyticity radius must be >= 0")
        if self.k < 0:
            raise ValueError("Sobolev exponent must be >= 0")


def _mu(u):
    n = degree_of(u.nmax).astype(float)
    return n * (n + 1.0) + 1.0


def sobolev_norm(u, k=2.0):
    return float(np.sqrt(np.sum(_mu(u) ** k * u.coeffs**2)))


def homogeneous_sobolev_norm(u, k=2.0, tol=1e-12):
    """``Hdot^k`` norm; ``k`` may be negative.  Requires a mean-free field."""
    if abs(u.coeffs[0]) > tol * max(1.0, float(np.max(np.abs(u.coeffs)))):
        raise MeanNotZeroError("homogeneous norm of a non-mean-free field")
    lam = _mu(u)[1:] - 1.0
    return float(np.sqrt(np.sum(lam**k * u.coeffs[1:] ** 2)))


def gevrey_norm(u, spec=GevreySpec()):
    """Gevrey norm; ``+inf`` once any weighted term leaves the float range."""
    mu = _mu(u)
    live = u.coeffs != 0.0
    if not np.any(live):
        return 0.0
    # log of each squared term, evaluated in log space to detect overflow
    logs = spec.k * np.log(mu[live]) + 2.0 * spec.lam * np.sqrt(mu[live]) + 2.0 * np.log(np.abs(u.coeffs[live]))
    top = logs.max()
    if top > np.log(np.finfo(float).max) - 10.0:
        return float("inf")
    return float(np.sqrt(np.sum(np.exp(logs))))


def algebra_defect(u, v, spec=GevreySpec()):
    """``||uv|| / (||u|| ||v||)`` in the Gevrey norm of ``spec``."""
    nu, nv = gevrey_norm(u, spec), gevrey_norm(v, spec)
    if nu == 0.0 or nv == 0.0:
        raise ZeroDivisionError("algebra ratio undefined for a zero factor")
    return gevrey_norm(expand_product(u, v), spec) / (nu * nv)


def analyticity_profile(u, bound, lam_grid, k=2.0):
    """Largest ``lam`` in ``lam_grid`` with ``gevrey_norm(u) <= bound`` (0 if none).

    The norm is nondecreasing in ``lam``, so the scan stops at the first failure.
    """
    lam_grid = np.asarray(lam_grid, dtype=float)
    if np.any(np.diff(lam_grid) <= 0):
        raise ValueError("lam_grid must be strictly increasing")
    best = 0.0
    for lam in lam_grid:
        if gevrey_norm(u, GevreySpec(lam, k)) <= bound:
            best = float(lam)
        else:
            break
    return best


def norm_table(u, sobolev_orders=(0, 1, 2, 4), lam_grid=(0.0, 0.1, 0.2, 0.5, 1.0)):
    """Rows ``(kind, parameter, value)`` for a quick norm summary."""
    rows = [("H", float(s), sobolev_norm(u, s)) for s in sobolev_orders]
    rows += [("G", float(lam), gevrey_norm(u, GevreySpec(lam))) for lam in lam_grid]
    return rows
