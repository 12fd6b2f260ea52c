"""Linear rigidity diagnostics near rigid rotation ``alpha Y_1^0``.

With ``a = sqrt(3/pi)/2`` and ``lambda_n = n(n+1)`` the operator

    L omega = (a alpha - c) d_phi omega + a (2 alpha + 4 gamma) d_phi Delta^{-1} omega

acts on degree ``n`` as ``mult(n) d_phi`` with
``mult(n) = (a alpha - c) - a (2 alpha + 4 gamma) / lambda_n``.  The
non-resonance condition ``gap(n) = 2a(alpha + 2 gamma) - lambda_n (a alpha - c) != 0``
is ``-lambda_n mult(n) != 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .harmonics import (
    FULL,
    MeanNotZeroError,
    SpectralField,
    analyze,
    d_phi,
    degree_of,
    eigenvalues,
    gauss_grid,
    get_transform,
    invert_laplacian,
    order_of,
)

__all__ = [
    "A_CONST",
    "CoercivityResult",
    "GapScan",
    "RigidityParams",
    "coercivity_constant",
    "degree1_excluded_constant",
    "linearized_RH",
    "linearized_rigid",
    "multiplier",
    "rigidity_report",
    "single_mode_multiplier_defect",
    "spectral_condition_gap",
]

A_CONST = 0.5 * math.sqrt(3.0 / math.pi)


@dataclass(frozen=True)
class RigidityParams:
    alpha: float
    c: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if self.alpha == 0:
            raise ValueError("alpha must be nonzero")

    @property
    def a(self):
        return A_CONST

    @property
    def slope(self):
        """``a alpha - c``: the ``n -> infinity`` multiplier."""
        return A_CONST * self.alpha - self.c

    @property
    def forcing(self):
        """``2a (alpha + 2 gamma)``."""
        return 2.0 * A_CONST * (self.alpha + 2.0 * self.gamma)


def multiplier(p, n):
    """``mult(n)`` for degree ``n >= 1`` (array friendly)."""
    lam = np.asarray(n, dtype=float) * (np.asarray(n, dtype=float) + 1.0)
    return p.slope - p.forcing / lam


@dataclass
class GapScan:
    n: np.ndarray
    gaps: np.ndarray
    violations: list
    quasi_resonances: list
    finite_check: bool
    root_lambda: float | None

    def rows(self):
        return [(int(k), float(g), int(k) in self.violations) for k, g in zip(self.n, self.gaps)]


def spectral_condition_gap(p, N, quasi_rtol=1e-6):
    """``gap(n)`` for ``n = 1..N`` with exact and near violations.

    ``finite_check`` is true when ``a alpha != c``: then ``|gap(n)|`` grows
    like ``lambda_n`` and only finitely many ``n`` can violate.  ``root_lambda``
    is the closed-form root ``2a(alpha+2gamma)/(a alpha - c)`` of the affine
    relation in ``lambda_n`` (``None`` when ``a alpha = c``).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    n = np.arange(1, N + 1)
    lam = (n * (n + 1)).astype(float)
    gaps = p.forcing - lam * p.slope
    scale = max(1.0, abs(p.forcing))
    violations = [int(k) for k, g in zip(n, gaps) if abs(g) <= 1e-12 * scale]
    quasi = [int(k) for k, g in zip(n, gaps) if 1e-12 * scale < abs(g) <= quasi_rtol * scale]
    root = None if p.slope == 0 else p.forcing / p.slope
    return GapScan(n, gaps, violations, quasi, p.slope != 0, root)


def _check_mean(omega, tol=1e-12):
    if abs(omega.coeffs[0]) > tol * max(1.0, float(np.max(np.abs(omega.coeffs)))):
        raise MeanNotZeroError("non-mean-free input")


def linearized_rigid(omega, p):
    """``(a alpha - c) d_phi omega + a (2 alpha + 4 gamma) d_phi Delta^{-1} omega``."""
    _check_mean(omega)
    psi = invert_laplacian(omega)
    out = p.slope * d_phi(omega) + (A_CONST * (2.0 * p.alpha + 4.0 * p.gamma)) * d_phi(psi)
    return SpectralField(out.coeffs, omega.nmax, FULL)


@dataclass
class CoercivityResult:
    C1: float
    argmax_degree: int | None
    limit: float
    diverges: bool
    C1_all_degrees: float

    def to_dict(self):
        return {
            "C1": self.C1,
            "argmax_degree": self.argmax_degree,
            "limit": self.limit,
            "diverges": self.diverges,
            "C1_all_degrees": self.C1_all_degrees,
        }


def coercivity_constant(p, N, excluded=frozenset()):
    """Smallest ``C1`` with ``||d_phi w|| <= C1 ||L w||`` on retained modes of degree ``<= N``.

    Parameters
    ----------
    excluded : set of (n, m)
        Modes removed from the competition; a degree counts as excluded
        only when all its non-zonal modes are.

    Returns
    -------
    CoercivityResult
        ``C1`` over ``n <= N`` (``inf`` on a vanishing multiplier), the
        ``n -> infinity`` value ``1/|a alpha - c|`` and the bound over all
        degrees.
    """
    excluded = {(int(n), int(m)) for n, m in excluded}
    best, arg = 0.0, None
    for n in range(1, N + 1):
        modes = [(n, m) for m in range(-n, n + 1) if m != 0]
        if all(md in excluded for md in modes):
            continue
        mu = abs(float(multiplier(p, n)))
        val = math.inf if mu == 0.0 or mu <= 1e-14 * max(1.0, abs(p.slope)) else 1.0 / mu
        if val > best:
            best, arg = val, n
    diverges = p.slope == 0
    limit = math.inf if diverges else 1.0 / abs(p.slope)
    # mult(n) is monotone in 1/lambda_n, so beyond N the sup sits at n = N+1 or at infinity
    tail = abs(float(multiplier(p, N + 1)))
    tail_val = math.inf if tail == 0.0 else 1.0 / tail
    return CoercivityResult(best, arg, limit, diverges, max(best, limit, tail_val))


def degree1_excluded_constant(alpha):
    """``3 / (2 a alpha)``: ``C1`` for ``gamma = c = 0`` off the degree-1 modes."""
    return 3.0 / (2.0 * A_CONST * abs(alpha))


def linearized_RH(omega, params):
    """``(1/2)(3 beta sqrt(5/pi) cos(theta) + gamma sqrt(3/pi)) (1 + 6 Delta^{-1}) d_phi omega``.

    The multiplication is done on a Gauss grid and analyzed exactly to
    degree ``N + 1``.
    """
    _check_mean(omega)
    N = omega.nmax
    lam = eigenvalues(N)
    shift = np.ones_like(lam)
    shift[1:] = 1.0 - 6.0 / lam[1:]
    v = d_phi(omega)
    v = SpectralField(v.coeffs * shift, N, FULL)
    out_n = N + 1
    grid = gauss_grid(N + 2, 2 * out_n + 2)
    values = get_transform(N, grid.n_theta, grid.n_phi).synthesize(v.coeffs)
    factor = 0.5 * (3.0 * params.beta * math.sqrt(5.0 / math.pi) * grid.cos_theta + params.gamma * math.sqrt(3.0 / math.pi))
    return analyze(values * factor[:, None], grid, out_n)


def _classify(p, scan, c1_full, c1_excl):
    tol = 1e-12 * max(1.0, abs(p.alpha), abs(p.c), abs(p.gamma))
    if abs(p.gamma) <= tol and abs(p.c) <= tol:
        return (
            "conditionally-rigid",
            f"conditionally rigid: C1 finite on the Y_1^(+-1)-orthogonal complement (C1 = {c1_excl.C1:.6g})",
        )
    if scan.violations:
        first = scan.violations[0]
        if abs(p.alpha - p.gamma) <= tol and abs(p.c) <= tol:
            return (
                "flexible-rotating",
                f"flexible regime: violation at n={first}; non-zonal steady states exist near alpha Y_1^0",
            )
        if abs(p.gamma) <= tol and abs(p.alpha - 3.0 * math.sqrt(math.pi / 3.0) * p.c) <= tol:
            return (
                "flexible-travelling",
                f"flexible regime: violation at n={first}; travelling waves on the non-rotating sphere",
            )
        return "resonant", f"condition fails at n={scan.violations}; rigidity not established"
    if c1_full.diverges:
        return "degenerate", "a alpha = c: condition holds for all n but no uniform C1 exists"
    return "rigid", "rigid regime: condition holds for all n, C1 finite"


def rigidity_report(p, N=50):
    """Gap scan, coercivity constants and regime classification."""
    scan = spectral_condition_gap(p, N)
    c1_full = coercivity_constant(p, N)
    c1_excl = coercivity_constant(p, N, excluded={(1, 1), (1, -1)})
    regime, verdict = _classify(p, scan, c1_full, c1_excl)
    report = {
        "alpha": p.alpha,
        "c": p.c,
        "gamma": p.gamma,
        "a": A_CONST,
        "nmax": N,
        "violations": scan.violations,
        "quasi_resonances": scan.quasi_resonances,
        "finite_check": scan.finite_check,
        "root_lambda": scan.root_lambda,
        "C1": c1_full.to_dict(),
        "C1_excluding_degree1": c1_excl.to_dict(),
        "regime": regime,
        "verdict": verdict,
    }
    if regime == "conditionally-rigid":
        computed = degree1_excluded_constant(p.alpha)
        printed = (2.0 / 3.0) * A_CONST * abs(p.alpha)
        report["degree1_excluded"] = {
            "computed": computed,
            "printed": printed,
            "discrepancy": not math.isclose(computed, printed, rel_tol=1e-12),
            "note": "computed constant 3/(2 a alpha) differs from the printed (2/3) a alpha",
        }
    return report


def single_mode_multiplier_defect(p, nmax=20):
    """Max deviation of ``linearized_rigid`` from ``mult(n) d_phi`` over single modes ``n <= nmax``."""
    worst = 0.0
    n_of, m_of = degree_of(nmax), order_of(nmax)
    for k in range(1, len(n_of)):
        w = SpectralField.mode(int(n_of[k]), int(m_of[k]), nmax)
        pred = float(multiplier(p, n_of[k])) * d_phi(w)
        worst = max(worst, float(np.max(np.abs(linearized_rigid(w, p).coeffs - pred.coeffs))))
    return worst
