"""Triple products and product expansions of real spherical harmonics.

Everything here is computed by exact Gauss quadrature on a grid sized for
the combined degree, which keeps a single code path with the transforms.
"""

from __future__ import annotations

import functools
import math

import numpy as np
from numpy.polynomial import polynomial as npoly

from .harmonics import (
    FULL,
    SpectralField,
    analyze,
    get_transform,
    product_grid,
    synthesize,
)

__all__ = [
    "GauntRatio",
    "expand_product",
    "gaunt_identity_ratio",
    "product_table",
    "rh_product_tables",
    "triple_product",
]


def _check(nm):
    n, m = int(nm[0]), int(nm[1])
    if n < 0 or abs(m) > n:
        raise ValueError(f"invalid spherical-harmonic index {nm}")
    return n, m


def triple_product(i1, i2, i3):
    """``int Y_{i1} Y_{i2} Y_{i3} dS`` for ``(n, m)`` index pairs."""
    key = tuple(sorted((_check(i1), _check(i2), _check(i3))))
    return _triple_cached(key)


@functools.lru_cache(maxsize=4096)
def _triple_cached(key):
    (n1, m1), (n2, m2), (n3, m3) = key
    nmax = max(n1, n2, n3)
    # exact for the degree n1+n2+n3 integrand; also resolves each factor
    grid = product_grid(max(n1 + n2 + n3, 2 * nmax), 0)
    t = get_transform(nmax, grid.n_theta, grid.n_phi)
    basis = []
    for n, m in key:
        c = np.zeros((nmax + 1) ** 2)
        c[n * n + n + m] = 1.0
        basis.append(t.synthesize(c))
    return grid.integrate(basis[0] * basis[1] * basis[2])


def expand_product(u, v, nmax_out=None):
    """Exact spectral coefficients of the pointwise product ``u * v``."""
    degree = u.nmax + v.nmax
    nmax_out = degree if nmax_out is None else nmax_out
    grid = product_grid(degree, nmax_out)
    values = synthesize(u, grid) * synthesize(v, grid)
    return analyze(values, grid, nmax_out, FULL, content_degree=degree)


def product_table(field, tol=1e-15):
    """Rows ``(n, m, coefficient)`` of the nonzero modes of ``field``."""
    return [(n, m, c) for (n, m), c in sorted(field.modes(tol).items())]


def rh_product_tables(beta, gamma):
    """Expansions of ``Psi Y_2^2`` and ``Psi^2 Y_2^2`` for ``Psi = beta Y_2^0 + gamma Y_1^0``."""
    psi = SpectralField.from_modes({(2, 0): beta, (1, 0): gamma}, nmax=2)
    y22 = SpectralField.mode(2, 2)
    first = expand_product(psi, y22)
    second = expand_product(expand_product(psi, psi), y22)
    return first, second


class GauntRatio:
    """Both sides of ``<f(Y_n^0), Y_n^0> = C <f'(Y_n^0) Y_n^1, Y_n^1>``."""

    __slots__ = ("n", "lhs", "rhs", "ratio")

    def __init__(self, n, lhs, rhs, ratio):
        self.n, self.lhs, self.rhs, self.ratio = n, lhs, rhs, ratio

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.ratio))

    def __repr__(self):
        return f"GauntRatio(n={self.n}, lhs={self.lhs:.6g}, rhs={self.rhs:.6g}, ratio={self.ratio})"


def gaunt_identity_ratio(n, f, rtol=1e-13):
    """Evaluate both sides of the zonal/sectoral identity by quadrature.

    Parameters
    ----------
    n : int
        Degree, ``n >= 1``.
    f : sequence of float
        Polynomial coefficients of ``f`` in increasing powers, degree <= 6.
    rtol : float
        ``rhs`` is treated as zero below ``rtol * max(|terms|)``; the ratio is
        then ``None``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    f = np.trim_zeros(np.asarray(f, dtype=float), "b")
    deg = max(len(f) - 1, 0)
    if deg > 6:
        raise ValueError("f must have degree <= 6")
    fprime = npoly.polyder(f) if len(f) > 1 else np.zeros(1)
    # both integrands are polynomials of degree (deg + 1) n on the sphere
    grid = product_grid(max((deg + 1) * n, 2 * n), 0)
    y0 = synthesize(SpectralField.mode(n, 0), grid)
    y1 = synthesize(SpectralField.mode(n, 1), grid)
    lhs_vals = npoly.polyval(y0, f) * y0
    rhs_vals = npoly.polyval(y0, fprime) * y1 * y1
    lhs = grid.integrate(lhs_vals)
    rhs = grid.integrate(rhs_vals)
    scale = max(
        grid.integrate(np.abs(lhs_vals)), grid.integrate(np.abs(rhs_vals)), math.ulp(1.0)
    )
    ratio = None if abs(rhs) <= rtol * scale else lhs / rhs
    return GauntRatio(n, lhs, rhs, ratio)
