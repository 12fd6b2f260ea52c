"""Non-zonal steady states near the degree-2 Rossby-Haurwitz stream function.

The steady state is sought as

    Psi_eps = beta Y_2^0 + gamma Y_1^0 + eps (Y_2^2 + psi),
    F_eps(s) = -6 s + eps f(s),   f(s) = A s + B s^2 + c s^3,

where ``psi`` is the fixed point of

    K(psi) = (Delta + 6)^{-1} f(A(psi), B(psi); z),   z = Psi_* + eps (Y_2^2 + psi),

restricted to fields with even ``m >= 0`` and no degree-2 content.  For a
given iterate, ``A`` and ``B`` enter the two solvability conditions
``<f(z), Y_2^0> = <f(z), Y_2^2> = 0`` affinely, so they are obtained from an
exact 2x2 solve.  The ``Y_2^2`` condition is divided by ``eps`` analytically,
which keeps the system regular at ``eps = 0``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.fft
from numpy.polynomial import Polynomial

from .gaunt import expand_product
from .harmonics import (
    EVEN_COSINE,
    FULL,
    SpectralField,
    analyze,
    degree_of,
    gauss_grid,
    get_transform,
    index,
    invert_shifted_helmholtz,
    laplacian,
    order_of,
    project_out_degree,
    project_symmetry,
)
from .norms import sobolev_norm

__all__ = [
    "CompatibilityError",
    "ConstructionConfig",
    "ConstructionResult",
    "CubicNonlinearity",
    "DegenerateSystemError",
    "NoContractionError",
    "RHParams",
    "SweepResult",
    "apply_K",
    "assemble_solution",
    "c_gamma_beta",
    "construct",
    "epsilon_sweep",
    "f0_f1_reference",
    "find_eps_max",
    "fixed_point",
    "leading_coefficients",
    "limit_coefficients",
    "linearized_forcing",
    "solve_AB",
    "steady_residual",
]

SQPI = math.sqrt(math.pi)


class DegenerateSystemError(ArithmeticError):
    """The 2x2 compatibility system for (A, B) is singular."""


class CompatibilityError(ArithmeticError):
    """Forcing retains kernel content after (A, B) were imposed."""


class NoContractionError(RuntimeError):
    """Fixed-point iteration did not converge."""

    def __init__(self, msg, result=None):
        super().__init__(msg)
        self.result = result


@dataclass(frozen=True)
class RHParams:
    """``Psi_* = beta Y_2^0 + gamma Y_1^0``; ``gamma = sqrt(pi/3) * gamma_tilde``."""

    beta: float
    gamma: float

    @property
    def gamma_tilde(self):
        """Angular velocity of the sphere."""
        return math.sqrt(3.0 / math.pi) * self.gamma

    @classmethod
    def from_rotation(cls, beta, gamma_tilde):
        return cls(beta, math.sqrt(math.pi / 3.0) * gamma_tilde)

    def check(self):
        if self.beta**2 + self.gamma**2 <= 0.0:
            raise ValueError("construction requires beta^2 + gamma^2 > 0")

    def base_stream(self, nmax=2):
        return SpectralField.from_modes({(2, 0): self.beta, (1, 0): self.gamma}, nmax=nmax)

    @property
    def size(self):
        """``1 + gamma^2 + beta^2``."""
        return 1.0 + self.gamma**2 + self.beta**2


def c_gamma_beta(params):
    return 0.5 / (1.0 + params.gamma**2 + params.beta**2) ** 2


@dataclass(frozen=True)
class CubicNonlinearity:
    A: float
    B: float
    c: float

    def __call__(self, s):
        return s * (self.A + s * (self.B + s * self.c))

    def derivative(self, s):
        return self.A + s * (2.0 * self.B + 3.0 * self.c * s)

    @property
    def polynomial(self):
        return Polynomial([0.0, self.A, self.B, self.c])


@dataclass(frozen=True)
class ConstructionConfig:
    eps: float
    nmax: int = 24
    tol: float = 1e-13
    max_iter: int = 60
    audit_nmax: int | None = None

    def __post_init__(self):
        if not self.eps >= 0.0:
            raise ValueError("eps must be >= 0")
        if self.tol <= 0.0:
            raise ValueError("tol must be > 0")
        if self.nmax < 6:
            raise ValueError("nmax must be >= 6 to hold the leading-order solution")

    @property
    def audit(self):
        return 3 * self.nmax if self.audit_nmax is None else self.audit_nmax


@dataclass(frozen=True)
class XMembership:
    """Measured quantities behind the three bounds defining the iteration space."""

    psi_Y22: float
    psi2_Y22: float
    h2: float
    bound_psi_Y22: float
    bound_psi2_Y22: float
    bound_h2: float

    @property
    def flags(self):
        return (
            abs(self.psi_Y22) <= self.bound_psi_Y22,
            abs(self.psi2_Y22) <= self.bound_psi2_Y22,
            self.h2 <= self.bound_h2,
        )

    @property
    def ok(self):
        return all(self.flags)


@dataclass
class ConstructionResult:
    params: RHParams
    config: ConstructionConfig
    psi: SpectralField
    nonlinearity: CubicNonlinearity
    iterations: int
    converged: bool
    increments: list = field(default_factory=list)
    contraction_estimates: list = field(default_factory=list)
    kernel_defects: list = field(default_factory=list)
    x_membership: XMembership | None = None
    ab_bounds_ok: bool = True
    residual_l2: float = float("nan")

    def coefficient(self, n, m):
        return self.psi[n, m]

    def to_dict(self):
        return {
            "beta": self.params.beta,
            "gamma": self.params.gamma,
            "eps": self.config.eps,
            "nmax": self.config.nmax,
            "tol": self.config.tol,
            "A": self.nonlinearity.A,
            "B": self.nonlinearity.B,
            "c": self.nonlinearity.c,
            "iterations": self.iterations,
            "converged": self.converged,
            "increments": list(self.increments),
            "contraction_estimates": list(self.contraction_estimates),
            "max_kernel_defect": max(self.kernel_defects, default=0.0),
            "x_membership": None
            if self.x_membership is None
            else {
                "psi_Y22": self.x_membership.psi_Y22,
                "psi2_Y22": self.x_membership.psi2_Y22,
                "h2": self.x_membership.h2,
                "flags": list(self.x_membership.flags),
            },
            "ab_bounds_ok": self.ab_bounds_ok,
            "residual_l2": self.residual_l2,
            "psi_Y62": self.psi[6, 2],
            "psi_Y42": self.psi[4, 2],
            "psi_Y40": self.psi[4, 0],
        }


class _Workspace:
    """Grid quantities shared by every K-step for fixed (params, nmax)."""

    def __init__(self, params, nmax):
        self.params = params
        self.nmax = nmax
        # cubic nonlinearity: integrands of degree <= 4N in cos(theta),
        # longitude wavenumbers <= 3N
        n_theta = 2 * nmax + 2
        n_phi = scipy.fft.next_fast_len(6 * nmax + 1)
        self.transform = get_transform(nmax, n_theta, n_phi)
        self.grid = self.transform.grid
        self.c = c_gamma_beta(params)
        self.Psi = self._grid(params.base_stream(nmax))
        self.Y20 = self._grid(SpectralField.mode(2, 0, nmax))
        self.Y22 = self._grid(SpectralField.mode(2, 2, nmax))

    def _grid(self, u):
        return self.transform.synthesize(u.resize(self.nmax).coeffs)

    def inner(self, f, g):
        return self.grid.integrate(f * g)


_WORKSPACES = {}


def _workspace(params, nmax):
    key = (params.beta, params.gamma, nmax)
    ws = _WORKSPACES.get(key)
    if ws is None:
        ws = _WORKSPACES.setdefault(key, _Workspace(params, nmax))
    return ws


def _ab_system(psi_grid, eps, ws):
    P = ws.Psi
    w = ws.Y22 + psi_grid
    z = P + eps * w
    c = ws.c
    M = np.array(
        [
            [ws.inner(z, ws.Y20), ws.inner(z * z, ws.Y20)],
            [ws.inner(w, ws.Y22), ws.inner(w * (z + P), ws.Y22)],
        ]
    )
    rhs = -c * np.array(
        [
            ws.inner(z**3, ws.Y20),
            ws.inner(w * (z * z + z * P + P * P), ws.Y22),
        ]
    )
    return M, rhs, z


def _solve(M, rhs):
    scale = float(np.max(np.abs(M)))
    det = float(np.linalg.det(M))
    if scale == 0.0 or abs(det) < 1e-12 * scale * scale:
        raise DegenerateSystemError("degenerate compatibility system")
    return np.linalg.solve(M, rhs)


def solve_AB(psi, eps, params):
    """Exact solution of the two compatibility conditions for ``(A, B)``.

    Parameters
    ----------
    psi : SpectralField
        Current iterate (even-cosine class, no degree-2 content).
    eps : float
        Perturbation amplitude; ``eps = 0`` gives the limit values.
    params : RHParams

    Returns
    -------
    A, B : float
    """
    params.check()
    ws = _workspace(params, max(psi.nmax, 6))
    psi_grid = ws._grid(psi)
    M, rhs, _ = _ab_system(psi_grid, eps, ws)
    A, B = _solve(M, rhs)
    return float(A), float(B)


def _k_step(psi, eps, ws, kernel_tol=1e-9):
    psi_grid = ws._grid(psi)
    M, rhs, z = _ab_system(psi_grid, eps, ws)
    A, B = _solve(M, rhs)
    f = CubicNonlinearity(float(A), float(B), ws.c)
    forcing = analyze(f(z), ws.grid, ws.nmax)
    scale = max(1.0, float(np.max(np.abs(forcing.coeffs))))
    projected = project_out_degree(project_symmetry(forcing, EVEN_COSINE), 2)
    defect = float(np.max(np.abs(forcing.coeffs - projected.coeffs))) / scale
    if defect > kernel_tol:
        raise CompatibilityError(f"compatibility failure: kernel defect {defect:.3e}")
    new = invert_shifted_helmholtz(projected, 2)
    return SpectralField(new.coeffs, ws.nmax, EVEN_COSINE), f, defect


def apply_K(psi, eps, params, nmax=None):
    """One application of the contraction map."""
    params.check()
    nmax = psi.nmax if nmax is None else nmax
    ws = _workspace(params, nmax)
    out, _, _ = _k_step(psi.resize(nmax), eps, ws)
    return out


def _x_membership(psi, params, tables):
    first, second = tables
    size = params.size
    s2 = params.beta**2 + params.gamma**2
    return XMembership(
        psi_Y22=psi.dot(first),
        psi2_Y22=psi.dot(second),
        h2=sobolev_norm(psi, 2),
        bound_psi_Y22=s2 / (8.0 * math.sqrt(5.0 * math.pi)),
        bound_psi2_Y22=s2 / 3.0,
        bound_h2=150.0 * size**2,
    )


def _ab_bounds(f, params):
    c = f.c
    b = abs(params.beta)
    s2 = params.beta**2 + params.gamma**2
    return abs(f.A) <= 5.0 * (1.0 + b) * s2 * c and abs(f.B) <= 8.0 * (1.0 + b) * c


def fixed_point(config, params):
    """Iterate ``psi <- K(psi)`` from ``psi = 0`` until the H^2 increment drops below ``tol``.

    Raises
    ------
    NoContractionError
        If ``max_iter`` steps do not reach the tolerance (the exception carries
        the partial result).
    """
    params.check()
    ws = _workspace(params, config.nmax)
    psi = SpectralField.zeros(config.nmax, EVEN_COSINE)
    result = ConstructionResult(
        params=params,
        config=config,
        psi=psi,
        nonlinearity=CubicNonlinearity(0.0, 0.0, ws.c),
        iterations=0,
        converged=False,
    )
    for it in range(1, config.max_iter + 1):
        try:
            new, f, defect = _k_step(psi, config.eps, ws)
        except (DegenerateSystemError, CompatibilityError, FloatingPointError, ValueError) as exc:
            raise NoContractionError(f"no contraction at eps={config.eps}: {exc}", result) from exc
        inc = sobolev_norm(new - psi, 2)
        if not math.isfinite(inc):
            raise NoContractionError(f"no contraction at eps={config.eps}: non-finite iterate", result)
        if result.increments:
            prev = result.increments[-1]
            result.contraction_estimates.append(inc / prev if prev > 0 else 0.0)
        result.increments.append(inc)
        result.kernel_defects.append(defect)
        result.psi, result.nonlinearity, result.iterations = new, f, it
        psi = new
        if inc < config.tol:
            result.converged = True
            break
    if not result.converged:
        raise NoContractionError(
            f"no contraction at eps={config.eps}: increment {result.increments[-1]:.3e} "
            f"after {config.max_iter} iterations",
            result,
        )
    # coefficients consistent with the final iterate
    result.nonlinearity = CubicNonlinearity(*solve_AB(result.psi, config.eps, params), ws.c)
    tables = _rh_tables(params, config.nmax)
    result.x_membership = _x_membership(result.psi, params, tables)
    result.ab_bounds_ok = _ab_bounds(result.nonlinearity, params)
    if not result.ab_bounds_ok:
        warnings.warn(
            f"A={result.nonlinearity.A:.4g}, B={result.nonlinearity.B:.4g} exceed the a priori bounds",
            RuntimeWarning,
            stacklevel=2,
        )
    return result


def _rh_tables(params, nmax):
    Psi = params.base_stream()
    y22 = SpectralField.mode(2, 2)
    first = expand_product(Psi, y22).resize(nmax)
    second = expand_product(expand_product(Psi, Psi), y22).resize(nmax)
    return first, second


def assemble_solution(result):
    """``(Psi_eps, F_eps)`` from a converged construction."""
    p, eps = result.params, result.config.eps
    nmax = result.psi.nmax
    Psi = p.base_stream(nmax) + eps * (SpectralField.mode(2, 2, nmax) + result.psi)
    Psi = SpectralField(Psi.coeffs, nmax, FULL)
    f = result.nonlinearity
    F = Polynomial([0.0, -6.0 + eps * f.A, eps * f.B, eps * f.c])
    return Psi, F


def steady_residual(Psi, F, gamma, audit_nmax=None):
    """``Delta Psi - 4 gamma Y_1^0 - F(Psi)`` analyzed to ``audit_nmax`` (default ``3 * Psi.nmax``).

    Evaluated as ``(Delta + 6) Psi - 4 gamma Y_1^0 - G(Psi)`` with
    ``G(s) = F(s) + 6 s``: the same quantity, but the O(1) parts cancel
    exactly mode by mode instead of through grid round-off.
    """
    N = Psi.nmax
    audit = 3 * N if audit_nmax is None else audit_nmax
    G = F + Polynomial([0.0, 6.0])
    content = max(len(G.coef) - 1, 1) * N
    n_theta = (content + audit) // 2 + 1
    n_phi = scipy.fft.next_fast_len(max(content + audit + 1, 2 * audit + 1))
    grid = gauss_grid(max(n_theta, N + 1), n_phi)
    values = G(get_transform(N, grid.n_theta, grid.n_phi).synthesize(Psi.coeffs))
    GPsi = analyze(values, grid, audit)
    lhs = (laplacian(Psi) + 6.0 * Psi).resize(audit) - 4.0 * gamma * SpectralField.mode(1, 0, audit)
    return lhs - GPsi


def construct(params, eps, nmax=24, tol=1e-13, max_iter=60, audit_nmax=None):
    """Fixed point plus steady-residual audit."""
    config = ConstructionConfig(eps=eps, nmax=nmax, tol=tol, max_iter=max_iter, audit_nmax=audit_nmax)
    result = fixed_point(config, params)
    Psi, F = assemble_solution(result)
    result.residual_l2 = steady_residual(Psi, F, params.gamma, config.audit).l2()
    return result


def find_eps_max(params, eps_hi=1.0, eps_lo=0.0, nmax=16, tol=1e-12, max_iter=60, steps=12):
    """Bisection for the largest eps at which the iteration still converges."""
    params.check()

    def ok(eps):
        try:
            fixed_point(ConstructionConfig(eps=eps, nmax=nmax, tol=tol, max_iter=max_iter), params)
        except NoContractionError:
            return False
        return True

    if ok(eps_hi):
        return eps_hi
    for _ in range(steps):
        mid = 0.5 * (eps_lo + eps_hi)
        if ok(mid):
            eps_lo = mid
        else:
            eps_hi = mid
    return eps_lo


def limit_coefficients(params):
    """Closed-form ``eps -> 0`` values ``(a0, b0)`` of the cubic coefficients."""
    b, g = params.beta, params.gamma
    c = c_gamma_beta(params)
    d = 7.0 * g * g + 15.0 * b * b
    a0 = -(9.0 * g * g + 15.0 * b * b + 240.0 * b * b * g * g / d) * c / (28.0 * math.pi)
    b0 = -b * c * (6.0 * g * g / d) * math.sqrt(5.0 / math.pi)
    return a0, b0


def f0_f1_reference(params):
    """Closed-form leading forcing ``f0`` and the ``m = 2`` part of ``f1``.

    Returns two ``{(n, m): value}`` dicts evaluated at the limit
    coefficients.  ``f1`` contains the order-2 modes produced by
    ``Y_2^2 (a0 + 2 b0 Psi_* + 3 c Psi_*^2)``.
    """
    b, g = params.beta, params.gamma
    c = c_gamma_beta(params)
    a0, b0 = limit_coefficients(params)
    pi = math.pi
    f0 = {
        (6, 0): b**3 * 45.0 / (154.0 * pi) * math.sqrt(5.0 / 13.0) * c,
        (5, 0): b * b * g * 15.0 * math.sqrt(33.0) / (154.0 * pi) * c,
        (4, 0): b * (9.0 * (11.0 * g * g + 5.0 * b * b) / (77.0 * pi * math.sqrt(5.0)) * c + b * 3.0 / (7.0 * SQPI) * b0),
        (3, 0): g
        * (3.0 / (10.0 * pi) * math.sqrt(3.0 / 7.0) * (g * g + 5.0 * b * b) * c + 3.0 * b * math.sqrt(3.0 / (35.0 * pi)) * b0),
        (2, 0): b * a0 + (7.0 * g * g + 5.0 * b * b) / (7.0 * math.sqrt(5.0 * pi)) * b0
        + 3.0 * b * (11.0 * g * g + 5.0 * b * b) / (28.0 * pi) * c,
        (1, 0): g * (3.0 / (140.0 * pi) * (21.0 * g * g + 55.0 * b * b) * c + b * 2.0 / math.sqrt(5.0 * pi) * b0 + a0),
        (0, 0): b * (21.0 * g * g + 5.0 * b * b) / (14.0 * pi * math.sqrt(5.0)) * c + (g * g + b * b) / (2.0 * SQPI) * b0,
    }
    f1 = {
        (6, 2): b * b * 45.0 / (11.0 * pi * math.sqrt(182.0)) * c,
        (5, 2): b * g * 3.0 / (2.0 * pi) * math.sqrt(15.0 / 77.0) * c,
        (4, 2): 3.0 * math.sqrt(3.0) / (154.0 * pi) * (11.0 * g * g - 5.0 * b * b) * c + b / 7.0 * math.sqrt(15.0 / pi) * b0,
        (3, 2): g * math.sqrt(3.0 / (7.0 * pi)) * b0,
        (2, 2): a0 - b * 2.0 / 7.0 * math.sqrt(5.0 / pi) * b0 + 3.0 * (3.0 * g * g + 5.0 * b * b) / (28.0 * pi) * c,
    }
    return f0, f1


def linearized_forcing(params, nmax=12):
    """Quadrature-built ``f0 = f(a0, b0; Psi_*)`` and the order-2 part of ``f1``.

    Independent of the closed forms in ``f0_f1_reference``: ``(a0, b0)`` come
    from ``solve_AB`` at ``psi = 0, eps = 0`` and the products are evaluated
    on the grid.
    """
    ws = _workspace(params, nmax)
    A, B = solve_AB(SpectralField.zeros(nmax, EVEN_COSINE), 0.0, params)
    f = CubicNonlinearity(A, B, ws.c)
    f0 = analyze(f(ws.Psi), ws.grid, nmax)
    f1_full = analyze(ws.Y22 * f.derivative(ws.Psi), ws.grid, nmax)
    f1 = f1_full.with_coeffs(np.where(order_of(nmax) == 2, f1_full.coeffs, 0.0))
    return f0, f1


def leading_coefficients(params):
    """``d<psi_eps, Y_n^2>/d eps`` at ``eps = 0`` for ``n = 6, 4``.

    Obtained from the order-2 modes of ``f1`` divided by ``6 - n(n+1)``.
    """
    _, f1 = f0_f1_reference(params)
    return {(n, 2): f1[(n, 2)] / (6.0 - n * (n + 1)) for n in (6, 5, 4, 3)}


@dataclass
class SweepResult:
    params: RHParams
    rows: list
    slopes: dict
    slope_errors: dict
    failures: list

    def to_dict(self):
        return {
            "beta": self.params.beta,
            "gamma": self.params.gamma,
            "rows": self.rows,
            "slopes": {f"Y{n}{m}": v for (n, m), v in self.slopes.items()},
            "slope_errors": {f"Y{n}{m}": v for (n, m), v in self.slope_errors.items()},
            "failures": self.failures,
        }


SWEEP_COLUMNS = ("eps", "psi_Y62", "psi_Y42", "psi_Y40", "A", "B", "iterations", "residual")


def _sweep_row(args):
    params, eps, nmax, tol = args
    try:
        r = construct(params, eps, nmax=nmax, tol=tol)
    except NoContractionError as exc:
        return {"eps": eps, "error": str(exc)}
    return {
        "eps": eps,
        "psi_Y62": r.psi[6, 2],
        "psi_Y42": r.psi[4, 2],
        "psi_Y40": r.psi[4, 0],
        "A": r.nonlinearity.A,
        "B": r.nonlinearity.B,
        "iterations": r.iterations,
        "residual": r.residual_l2,
    }


def _extrapolate(eps, values):
    """Linear extrapolation to eps = 0 of ``values/eps`` from the two smallest eps,
    with the spread against the next pair as error bar."""
    order = np.argsort(eps)
    e = np.asarray(eps, dtype=float)[order]
    g = np.asarray(values, dtype=float)[order] / e
    if len(e) == 1:
        return float(g[0]), float("nan")

    def pair(i):
        return (e[i + 1] * g[i] - e[i] * g[i + 1]) / (e[i + 1] - e[i])

    best = pair(0)
    err = abs(best - pair(1)) if len(e) > 2 else abs(best - g[0])
    return float(best), float(err)


def epsilon_sweep(params, eps_list, nmax=24, tol=1e-13, workers=1):
    """Construct for each eps and extrapolate the leading slopes.

    Failed rows are recorded and skipped.
    """
    params.check()
    jobs = [(params, float(e), nmax, tol) for e in eps_list]
    if workers > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_row, jobs))
    else:
        rows = [_sweep_row(j) for j in jobs]
    good = [r for r in rows if "error" not in r]
    failures = [r for r in rows if "error" in r]
    slopes, errors = {}, {}
    if good:
        eps = [r["eps"] for r in good]
        for key, col in (((6, 2), "psi_Y62"), ((4, 2), "psi_Y42")):
            slopes[key], errors[key] = _extrapolate(eps, [r[col] for r in good])
    return SweepResult(params, good, slopes, errors, failures)


def mode_index(n, m):
    return index(n, m)


def degree_two_content(u):
    return float(np.max(np.abs(u.coeffs[degree_of(u.nmax) == 2])))
