"""Real spherical harmonics on the unit sphere.

Coefficients are stored in a flat vector with ``index(n, m) = n*n + n + m``
for ``|m| <= n <= nmax``.  The basis is

    Y_n^m = Theta_n^{|m|}(theta) * cos(m phi)     m > 0
    Y_n^0 = Theta_n^0(theta)
    Y_n^m = Theta_n^{|m|}(theta) * sin(|m| phi)   m < 0

with every ``Y_n^m`` orthonormal in L^2(S^2).  The Condon-Shortley sign of
``P_n^m`` and the explicit ``(-1)^m`` prefactor cancel, so ``Theta_n^m`` is
positive near the north pole for every order (e.g. ``Y_1^1 = sqrt(3/4pi)
sin(theta) cos(phi)``).

Grids use Gauss-Legendre nodes in ``cos(theta)`` (poles never sampled) and a
uniform longitude grid, so every transform is an exact quadrature for
band-limited data.
"""

from __future__ import annotations

import functools
import json
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.fft

__all__ = [
    "EVEN_COSINE",
    "FULL",
    "KernelObstructionError",
    "MeanNotZeroError",
    "QuadratureGrid",
    "ResolutionError",
    "SpectralField",
    "Transform",
    "analyze",
    "d_phi",
    "degree_of",
    "eigenvalues",
    "gauss_grid",
    "get_transform",
    "index",
    "invert_laplacian",
    "invert_shifted_helmholtz",
    "jacobian",
    "laplacian",
    "legendre_table",
    "n_coeffs",
    "product_grid",
    "project_out_degree",
    "project_symmetry",
    "synthesize",
    "ylm",
]

FULL = "full"
EVEN_COSINE = "even-cosine"
_SYMMETRIES = (FULL, EVEN_COSINE)


class ResolutionError(ValueError):
    """Grid too coarse for the requested spectral content."""


class MeanNotZeroError(ValueError):
    """Operation requires a field with zero spherical mean."""


class KernelObstructionError(ValueError):
    """Input has a component in the kernel of the operator being inverted."""


def index(n, m):
    return n * n + n + m


def n_coeffs(nmax):
    return (nmax + 1) ** 2


@functools.lru_cache(maxsize=None)
def _degree_order(nmax):
    n = np.concatenate([np.full(2 * k + 1, k) for k in range(nmax + 1)])
    m = np.concatenate([np.arange(-k, k + 1) for k in range(nmax + 1)])
    n.setflags(write=False)
    m.setflags(write=False)
    return n, m


def degree_of(nmax):
    """Degree ``n`` of every slot of the flat coefficient layout."""
    return _degree_order(nmax)[0]


def order_of(nmax):
    """Order ``m`` of every slot of the flat coefficient layout."""
    return _degree_order(nmax)[1]


def eigenvalues(nmax):
    """``n(n+1)`` per coefficient slot."""
    n = degree_of(nmax)
    return (n * (n + 1)).astype(float)


class SpectralField:
    """Truncated real spherical-harmonic expansion.

    Parameters
    ----------
    coeffs : array_like
        Flat coefficient vector of length ``(nmax + 1)**2``.
    nmax : int
        Truncation degree.
    symmetry : {"full", "even-cosine"}
        ``"even-cosine"`` marks fields whose only nonzero coefficients have
        even ``m >= 0``.  The flag is advisory; use ``project_symmetry`` to
        enforce it.
    """

    __slots__ = ("coeffs", "nmax", "symmetry")

    def __init__(self, coeffs, nmax, symmetry=FULL):
        coeffs = np.array(coeffs, dtype=float)
        if nmax < 0:
            raise ValueError("nmax must be >= 0")
        if coeffs.shape != (n_coeffs(nmax),):
            raise ValueError(
                f"expected {n_coeffs(nmax)} coefficients for nmax={nmax}, "
                f"got shape {coeffs.shape}"
            )
        if symmetry not in _SYMMETRIES:
            raise ValueError(f"unknown symmetry class {symmetry!r}")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficients must be finite")
        self.coeffs = coeffs
        self.nmax = int(nmax)
        self.symmetry = symmetry

    @classmethod
    def zeros(cls, nmax, symmetry=FULL):
        return cls(np.zeros(n_coeffs(nmax)), nmax, symmetry)

    @classmethod
    def from_modes(cls, modes, nmax=None, symmetry=FULL):
        """Build from ``{(n, m): value}``."""
        if nmax is None:
            nmax = max((n for n, _ in modes), default=0)
        out = np.zeros(n_coeffs(nmax))
        for (n, m), value in modes.items():
            if not (0 <= n <= nmax and abs(m) <= n):
                raise ValueError(f"invalid index ({n}, {m}) for nmax={nmax}")
            out[index(n, m)] += value
        return cls(out, nmax, symmetry)

    @classmethod
    def mode(cls, n, m, nmax=None, value=1.0):
        return cls.from_modes({(n, m): value}, nmax=max(n, nmax or 0))

    def __getitem__(self, nm):
        n, m = nm
        if n > self.nmax:
            return 0.0
        if abs(m) > n:
            raise IndexError(f"|m| > n for ({n}, {m})")
        return float(self.coeffs[index(n, m)])

    def modes(self, tol=0.0):
        """Nonzero ``{(n, m): value}`` entries above ``tol``."""
        n, m = _degree_order(self.nmax)
        keep = np.abs(self.coeffs) > tol
        return {(int(a), int(b)): float(c) for a, b, c in zip(n[keep], m[keep], self.coeffs[keep])}

    def resize(self, nmax):
        """Zero-pad or truncate to degree ``nmax``."""
        out = np.zeros(n_coeffs(nmax))
        k = min(len(out), len(self.coeffs))
        out[:k] = self.coeffs[:k]
        return SpectralField(out, nmax, self.symmetry)

    def copy(self):
        return SpectralField(self.coeffs.copy(), self.nmax, self.symmetry)

    def with_coeffs(self, coeffs):
        return SpectralField(coeffs, self.nmax, self.symmetry)

    def _align(self, other):
        nmax = max(self.nmax, other.nmax)
        sym = self.symmetry if self.symmetry == other.symmetry else FULL
        return self.resize(nmax).coeffs, other.resize(nmax).coeffs, nmax, sym

    def __add__(self, other):
        if not isinstance(other, SpectralField):
            return NotImplemented
        a, b, nmax, sym = self._align(other)
        return SpectralField(a + b, nmax, sym)

    def __sub__(self, other):
        if not isinstance(other, SpectralField):
            return NotImplemented
        a, b, nmax, sym = self._align(other)
        return SpectralField(a - b, nmax, sym)

    def __mul__(self, scalar):
        if isinstance(scalar, SpectralField):
            return NotImplemented
        return SpectralField(self.coeffs * float(scalar), self.nmax, self.symmetry)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return SpectralField(self.coeffs / float(scalar), self.nmax, self.symmetry)

    def __neg__(self):
        return SpectralField(-self.coeffs, self.nmax, self.symmetry)

    def __repr__(self):
        return f"SpectralField(nmax={self.nmax}, symmetry={self.symmetry!r}, nnz={len(self.modes())})"

    def l2(self):
        """L^2(S^2) norm (Parseval)."""
        return float(np.linalg.norm(self.coeffs))

    def dot(self, other):
        """L^2(S^2) inner product."""
        a, b, _, _ = self._align(other)
        return float(a @ b)

    @property
    def mean(self):
        """Spherical mean ``(1/4pi) int u dS``."""
        return self.coeffs[0] / (2.0 * np.sqrt(np.pi))

    def to_json(self):
        """Serialize as a header plus ``{n, m, value}`` records (17 significant digits)."""
        n, m = _degree_order(self.nmax)
        header = json.dumps({"max_degree": self.nmax, "symmetry": self.symmetry})[:-1]
        records = ",\n    ".join(
            f'{{"n": {int(a)}, "m": {int(b)}, "value": {c:.17g}}}'
            for a, b, c in zip(n, m, self.coeffs)
        )
        return f'{header}, "coefficients": [\n    {records}\n]}}'

    @classmethod
    def from_json(cls, text):
        data = json.loads(text) if isinstance(text, str) else text
        nmax = int(data["max_degree"])
        modes = {(int(r["n"]), int(r["m"])): float(r["value"]) for r in data["coefficients"]}
        return cls.from_modes(modes, nmax=nmax, symmetry=data.get("symmetry", FULL))


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Gauss-Legendre (in cos theta) by uniform-longitude grid."""

    n_theta: int
    n_phi: int
    theta: np.ndarray
    cos_theta: np.ndarray
    sin_theta: np.ndarray
    weights: np.ndarray
    phi: np.ndarray

    @property
    def shape(self):
        return (self.n_theta, self.n_phi)

    @property
    def max_wavenumber(self):
        """Largest longitudinal wavenumber exactly represented on the grid."""
        return (self.n_phi - 1) // 2

    def integrate(self, values):
        """Quadrature of ``values`` over the sphere."""
        values = np.asarray(values)
        return float(self.weights @ values.sum(axis=-1)) * (2.0 * np.pi / self.n_phi)

    def inner(self, f, g):
        return self.integrate(np.asarray(f) * np.asarray(g))

    def mesh(self):
        return np.meshgrid(self.theta, self.phi, indexing="ij")


@functools.lru_cache(maxsize=64)
def gauss_grid(n_theta, n_phi):
    """Grid with ``n_theta`` Gauss nodes and ``n_phi`` longitudes."""
    if n_theta < 1 or n_phi < 1:
        raise ValueError("grid sizes must be positive")
    x, w = np.polynomial.legendre.leggauss(n_theta)
    # north to south
    x, w = x[::-1].copy(), w[::-1].copy()
    theta = np.arccos(x)
    for arr in (x, w, theta):
        arr.setflags(write=False)
    sin_theta = np.sqrt((1.0 - x) * (1.0 + x))
    sin_theta.setflags(write=False)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    phi.setflags(write=False)
    return QuadratureGrid(n_theta, n_phi, theta, x, sin_theta, w, phi)


def product_grid(degree, nmax_out=None):
    """Smallest grid on which a field of polynomial degree ``degree`` is
    analyzed exactly up to degree ``nmax_out`` (default ``degree``)."""
    if nmax_out is None:
        nmax_out = degree
    total = degree + nmax_out
    n_theta = total // 2 + 1
    n_phi = scipy.fft.next_fast_len(max(total + 1, 2 * max(degree, nmax_out) + 1))
    return gauss_grid(n_theta, n_phi)


def legendre_table(nmax, theta):
    """θ-parts of the orthonormal real harmonics and their θ-derivatives.

    Parameters
    ----------
    nmax : int
        Maximum degree.
    theta : array_like
        Colatitudes strictly inside ``(0, pi)``.

    Returns
    -------
    P, dP : ndarray, shape (nmax + 1, nmax + 1, len(theta))
        ``P[m, n]`` is ``Theta_n^m(theta)`` and ``dP[m, n]`` its derivative
        in θ; entries with ``n < m`` are zero.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if np.any(theta <= 0.0) or np.any(theta >= np.pi):
        raise ValueError("nodes must lie strictly inside (0, pi)")
    x = np.cos(theta)
    s = np.sin(theta)
    L = nmax + 1
    # normalized on [-1, 1]: int pbar^2 dx = 1, no Condon-Shortley sign
    pbar = np.zeros((L, L, len(theta)))
    dpbar = np.zeros_like(pbar)
    sectoral = np.full_like(x, 1.0 / np.sqrt(2.0))
    for m in range(L):
        if m > 0:
            sectoral = np.sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * sectoral
        pbar[m, m] = sectoral
        if m + 1 <= nmax:
            pbar[m, m + 1] = np.sqrt(2.0 * m + 3.0) * x * sectoral
        for n in range(m + 2, L):
            a = np.sqrt((4.0 * n * n - 1.0) / (n * n - m * m))
            b = np.sqrt(((n - 1.0) ** 2 - m * m) / (4.0 * (n - 1.0) ** 2 - 1.0))
            pbar[m, n] = a * (x * pbar[m, n - 1] - b * pbar[m, n - 2])
        for n in range(m, L):
            lower = pbar[m, n - 1] if n - 1 >= m else 0.0
            c = np.sqrt((n * n - m * m) * (2.0 * n + 1.0) / (2.0 * n - 1.0)) if n > m else 0.0
            dpbar[m, n] = (n * x * pbar[m, n] - c * lower) / s
    scale = np.full(L, 1.0 / np.sqrt(np.pi))
    scale[0] = 1.0 / np.sqrt(2.0 * np.pi)
    return pbar * scale[:, None, None], dpbar * scale[:, None, None]


def ylm(n, m, theta, phi):
    """Pointwise ``Y_n^m(theta, phi)`` (broadcasting)."""
    theta = np.asarray(theta, dtype=float)
    P, _ = legendre_table(n, theta.ravel())
    part = P[abs(m), n].reshape(theta.shape)
    if m > 0:
        return part * np.cos(m * np.asarray(phi))
    if m < 0:
        return part * np.sin(-m * np.asarray(phi))
    return part * np.ones_like(np.asarray(phi, dtype=float))


class Transform:
    """Exact synthesis/analysis between degree-``nmax`` coefficients and a grid."""

    def __init__(self, nmax, grid):
        if grid.max_wavenumber < nmax:
            raise ResolutionError(
                f"n_phi={grid.n_phi} cannot represent order {nmax}; need n_phi >= {2 * nmax + 1}"
            )
        self.nmax = nmax
        self.grid = grid
        self.P, self.dP = legendre_table(nmax, grid.theta)
        n, m = _degree_order(nmax)
        # (m, n) slots of the cos / sin parts in the flat layout
        L = nmax + 1
        cos_idx = np.full((L, L), -1)
        sin_idx = np.full((L, L), -1)
        for nn in range(L):
            for mm in range(nn + 1):
                cos_idx[mm, nn] = index(nn, mm)
                if mm > 0:
                    sin_idx[mm, nn] = index(nn, -mm)
        self._cos_idx = cos_idx
        self._sin_idx = sin_idx
        self._cos_mask = cos_idx >= 0
        self._sin_mask = sin_idx >= 0
        # weights folded into the analysis tables
        self._Pw = self.P * grid.weights[None, None, :]

    def _split(self, coeffs):
        L = self.nmax + 1
        c = np.zeros((L, L))
        s = np.zeros((L, L))
        c[self._cos_mask] = coeffs[self._cos_idx[self._cos_mask]]
        s[self._sin_mask] = coeffs[self._sin_idx[self._sin_mask]]
        return c, s

    def _merge(self, c, s):
        out = np.zeros(n_coeffs(self.nmax))
        out[self._cos_idx[self._cos_mask]] = c[self._cos_mask]
        out[self._sin_idx[self._sin_mask]] = s[self._sin_mask]
        return out

    def _fourier_to_grid(self, fc, fs):
        # fc, fs: (m, theta) cos/sin amplitudes
        n_phi = self.grid.n_phi
        spec = np.zeros((self.grid.n_theta, n_phi // 2 + 1), dtype=complex)
        L = self.nmax + 1
        spec[:, 0] = n_phi * fc[0]
        spec[:, 1:L] = 0.5 * n_phi * (fc[1:] - 1j * fs[1:]).T
        return np.fft.irfft(spec, n=n_phi, axis=1)

    def synthesize(self, coeffs, table=None):
        c, s = self._split(coeffs)
        table = self.P if table is None else table
        fc = np.einsum("mnt,mn->mt", table, c)
        fs = np.einsum("mnt,mn->mt", table, s)
        return self._fourier_to_grid(fc, fs)

    def synthesize_dtheta(self, coeffs):
        return self.synthesize(coeffs, table=self.dP)

    def analyze(self, values):
        n_phi = self.grid.n_phi
        X = np.fft.rfft(values, axis=1)
        L = self.nmax + 1
        # int g cos(m phi) dphi = pi * fc (m > 0), = 2 pi * f0 (m = 0)
        fc = np.empty((L, self.grid.n_theta))
        fs = np.empty((L, self.grid.n_theta))
        fc[0] = 2.0 * np.pi * X[:, 0].real / n_phi
        fs[0] = 0.0
        fc[1:] = (2.0 * np.pi / n_phi) * X[:, 1:L].real.T
        fs[1:] = -(2.0 * np.pi / n_phi) * X[:, 1:L].imag.T
        c = np.einsum("mnt,mt->mn", self._Pw, fc)
        s = np.einsum("mnt,mt->mn", self._Pw, fs)
        return self._merge(c, s)


@functools.lru_cache(maxsize=64)
def get_transform(nmax, n_theta, n_phi):
    """Cached ``Transform`` for ``nmax`` on the ``(n_theta, n_phi)`` Gauss grid."""
    return Transform(nmax, gauss_grid(n_theta, n_phi))


def _transform_for(nmax, grid):
    return get_transform(nmax, grid.n_theta, grid.n_phi)


def synthesize(u, grid):
    """Evaluate ``u`` at the nodes of ``grid``; returns an ``(n_theta, n_phi)`` array."""
    if grid.n_theta < u.nmax + 1 or grid.max_wavenumber < u.nmax:
        raise ResolutionError(f"grid {grid.shape} too coarse for degree {u.nmax}")
    return _transform_for(u.nmax, grid).synthesize(u.coeffs)


def analyze(values, grid, nmax, symmetry=FULL, content_degree=None):
    """Spectral coefficients up to ``nmax`` of grid values.

    Exact when the data are a polynomial of degree ``content_degree`` and
    ``n_theta >= (content_degree + nmax)/2 + 1``, ``n_phi > content_degree + nmax``.
    A warning is issued when a declared ``content_degree`` is under-resolved.
    """
    values = np.asarray(values, dtype=float)
    if values.shape != grid.shape:
        raise ValueError(f"values shape {values.shape} does not match grid {grid.shape}")
    if grid.max_wavenumber < nmax:
        raise ResolutionError(f"grid {grid.shape} cannot resolve order {nmax}")
    if content_degree is not None:
        total = content_degree + nmax
        if 2 * grid.n_theta - 1 < total or grid.n_phi < total + 1:
            warnings.warn(
                f"grid {grid.shape} under-resolves content of degree {content_degree} "
                f"analyzed to degree {nmax}; coefficients are aliased",
                RuntimeWarning,
                stacklevel=2,
            )
    coeffs = _transform_for(nmax, grid).analyze(values)
    out = SpectralField(coeffs, nmax, FULL)
    return project_symmetry(out, symmetry) if symmetry != FULL else out


def laplacian(u):
    return u.with_coeffs(-eigenvalues(u.nmax) * u.coeffs)


def _scale(u):
    return max(1.0, float(np.max(np.abs(u.coeffs))))


def invert_laplacian(u, tol=1e-12):
    """Mean-free solution of ``Delta v = u``."""
    if abs(u.coeffs[0]) > tol * _scale(u):
        raise MeanNotZeroError("non-mean-free input")
    lam = eigenvalues(u.nmax)
    out = np.zeros_like(u.coeffs)
    out[1:] = -u.coeffs[1:] / lam[1:]
    return u.with_coeffs(out)


def invert_shifted_helmholtz(u, k, tol=1e-12):
    """Solve ``(Delta + k(k+1)) v = u`` on the complement of degree ``k``."""
    n = degree_of(u.nmax)
    kernel = n == k
    if np.any(np.abs(u.coeffs[kernel]) > tol * _scale(u)):
        raise KernelObstructionError(f"kernel obstruction: input has degree-{k} content")
    denom = k * (k + 1) - eigenvalues(u.nmax)
    out = np.zeros_like(u.coeffs)
    out[~kernel] = u.coeffs[~kernel] / denom[~kernel]
    return u.with_coeffs(out)


def d_phi(u):
    """Longitude derivative; maps the cos/sin partners of each order into each other."""
    n, m = _degree_order(u.nmax)
    out = np.zeros_like(u.coeffs)
    pos = m > 0
    ip = np.flatnonzero(pos)
    ineg = ip - 2 * m[pos]  # index(n, -m) = index(n, m) - 2m
    out[ineg] = -m[pos] * u.coeffs[ip]
    out[ip] = m[pos] * u.coeffs[ineg]
    sym = FULL if u.symmetry == EVEN_COSINE and np.any(out[ineg]) else u.symmetry
    return SpectralField(out, u.nmax, sym)


def jacobian(psi, q, nmax_out=None, grid=None):
    """Spectral coefficients of ``(1/sin θ)(∂_φψ ∂_θq − ∂_θψ ∂_φq)``.

    The product has polynomial degree ``psi.nmax + q.nmax - 1``; the default
    grid makes the analysis to ``nmax_out`` exact (alias free).
    """
    if nmax_out is None:
        nmax_out = max(psi.nmax, q.nmax)
    content = psi.nmax + q.nmax - 1
    if grid is None:
        grid = product_grid(max(content, 0), nmax_out)
        grid = gauss_grid(grid.n_theta, scipy.fft.next_fast_len(max(grid.n_phi, 2 * max(psi.nmax, q.nmax) + 1)))
    tp = _transform_for(psi.nmax, grid)
    tq = _transform_for(q.nmax, grid)
    psi_phi = tp.synthesize(d_phi(psi).coeffs)
    psi_theta = tp.synthesize_dtheta(psi.coeffs)
    q_phi = tq.synthesize(d_phi(q).coeffs)
    q_theta = tq.synthesize_dtheta(q.coeffs)
    values = (psi_phi * q_theta - psi_theta * q_phi) / grid.sin_theta[:, None]
    return analyze(values, grid, nmax_out, content_degree=content)


def project_symmetry(u, symmetry):
    """Zero the coefficients excluded by ``symmetry``; idempotent."""
    if symmetry == FULL:
        return u.copy()
    if symmetry != EVEN_COSINE:
        raise ValueError(f"unknown symmetry class {symmetry!r}")
    m = order_of(u.nmax)
    keep = (m >= 0) & (m % 2 == 0)
    return SpectralField(np.where(keep, u.coeffs, 0.0), u.nmax, EVEN_COSINE)


def project_out_degree(u, k):
    n = degree_of(u.nmax)
    return u.with_coeffs(np.where(n == k, 0.0, u.coeffs))


def symmetry_defect(u, symmetry=EVEN_COSINE):
    """Largest coefficient that ``project_symmetry`` would remove."""
    return float(np.max(np.abs(u.coeffs - project_symmetry(u, symmetry).coeffs), initial=0.0))
