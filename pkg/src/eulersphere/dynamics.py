"""Pseudo-spectral evolution of the vorticity equation on the rotating sphere.

    d/dt Omega + J(Psi, Omega - 4 gamma Y_1^0) = 0,   Delta Psi = Omega.

The time stepper works on a complex ``(m, n)`` coefficient layout, with
``h[m, n] = c_n^m - i s_n^m`` so that a field is ``Re sum h e^{i m phi}``.
Every tendency evaluation is alias free: the Jacobian of two degree-``N``
fields has degree ``2N - 1`` and is analyzed on a Gauss grid that integrates
it against degree ``N`` exactly (the usual 3/2 padding).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.fft

from .harmonics import (
    FULL,
    MeanNotZeroError,
    SpectralField,
    gauss_grid,
    get_transform,
    index,
    invert_laplacian,
    jacobian,
    laplacian,
    order_of,
)

__all__ = [
    "Diagnostics",
    "EvolutionBlowup",
    "EvolutionConfig",
    "StabilityError",
    "evolve",
    "rotate_frame",
    "step_rk4",
    "tendency",
    "travelling_wave_check",
]

A_ROT = 0.5 * math.sqrt(3.0 / math.pi)
RK4_LIMIT = 2.0 * math.sqrt(2.0)  # RK4 stability interval on the imaginary axis


class StabilityError(ValueError):
    """Time step violates the RK4 advective limit."""


class EvolutionBlowup(FloatingPointError):
    """Non-finite state; carries the last finite state and its time."""

    def __init__(self, msg, last_state, time):
        super().__init__(msg)
        self.last_state = last_state
        self.time = time


@dataclass(frozen=True)
class EvolutionConfig:
    dt: float
    T: float
    gamma: float = 0.0
    nmax: int = 16
    dealias: bool = True
    sample_every: int = 1

    def __post_init__(self):
        if not (self.dt > 0 and self.T > 0):
            raise ValueError("dt and T must be positive")
        if self.sample_every < 1:
            raise ValueError("sample_every must be >= 1")

    @property
    def n_steps(self):
        return int(round(self.T / self.dt))


@dataclass
class Diagnostics:
    time: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    enstrophy: list = field(default_factory=list)
    mean: list = field(default_factory=list)
    drift: list = field(default_factory=list)

    def relative_change(self, name):
        s = np.asarray(getattr(self, name))
        return float(np.max(np.abs(s - s[0])) / abs(s[0])) if s[0] != 0 else float(np.max(np.abs(s)))

    def rows(self):
        return list(zip(self.time, self.energy, self.enstrophy, self.mean, self.drift))


def tendency(omega, gamma, nmax_out=None):
    """``-J(Delta^{-1} Omega, Omega - 4 gamma Y_1^0)``, alias free, truncated to ``nmax_out``."""
    psi = invert_laplacian(omega)
    q = omega.resize(max(omega.nmax, 1)) - 4.0 * gamma * SpectralField.mode(1, 0, max(omega.nmax, 1))
    out = jacobian(psi, q, nmax_out=omega.nmax if nmax_out is None else nmax_out)
    return SpectralField(-out.coeffs, out.nmax, FULL)


def rotate_frame(u, dphi):
    """``u(theta, phi - dphi)``, exact in spectral space."""
    m = order_of(u.nmax)
    pos = np.flatnonzero(m > 0)
    neg = pos - 2 * m[pos]
    ang = m[pos] * dphi
    a, b = u.coeffs[pos], u.coeffs[neg]
    out = u.coeffs.copy()
    out[pos] = a * np.cos(ang) - b * np.sin(ang)
    out[neg] = a * np.sin(ang) + b * np.cos(ang)
    return SpectralField(out, u.nmax, FULL)


class _Kernel:
    """Batched tendency on the complex ``(m, n)`` layout."""

    def __init__(self, nmax, gamma, dealias=True):
        L = nmax + 1
        if dealias:
            content = 2 * nmax - 1
            n_theta = (content + nmax) // 2 + 1
            n_phi = scipy.fft.next_fast_len(content + nmax + 1)
        else:
            n_theta, n_phi = nmax + 1, scipy.fft.next_fast_len(2 * nmax + 1)
        t = get_transform(nmax, n_theta, n_phi)
        self.nmax, self.gamma, self.t = nmax, gamma, t
        self.n_phi = n_phi
        self.grid = t.grid
        self.tables = np.stack([t.P, t.dP])  # (2, m, n, theta)
        self.Pw = t._Pw
        self.im = 1j * np.arange(L)[:, None]  # i m, broadcast over n
        n = np.arange(L, dtype=float)
        lam = n * (n + 1.0)
        self.inv_lam = np.zeros(L)
        self.inv_lam[1:] = 1.0 / lam[1:]
        self.lam = lam
        # synthesis weights: irfft sums 2 Re for m > 0
        w = np.full(L, 0.5 * n_phi)
        w[0] = n_phi
        self.syn_w = w[:, None]
        self.inv_sin = 1.0 / self.grid.sin_theta[:, None]
        self.valid = np.arange(L)[:, None] <= np.arange(L)[None, :]
        self.y10 = 4.0 * gamma  # coefficient of 4 gamma Y_1^0 at (m=0, n=1)

    # layout conversion
    def to_complex(self, u):
        c, s = self.t._split(u.resize(self.nmax).coeffs)
        return c - 1j * s

    def to_field(self, h):
        return SpectralField(self.t._merge(h.real, -h.imag), self.nmax, FULL)

    def _grid(self, spec_mt):
        # spec_mt: (..., m, theta) complex amplitudes -> (..., theta, phi)
        spec = np.zeros(spec_mt.shape[:-2] + (spec_mt.shape[-1], self.n_phi // 2 + 1), dtype=complex)
        L = self.nmax + 1
        spec[..., :L] = np.swapaxes(spec_mt * self.syn_w, -1, -2)
        return np.fft.irfft(spec, n=self.n_phi, axis=-1)

    def __call__(self, h):
        psi = -h * self.inv_lam[None, :]
        q = h.copy()
        q[0, 1] -= self.y10
        pair = np.stack([psi, q])  # (2, m, n)
        fourier = np.einsum("kmnt,bmn->kbmt", self.tables, pair)  # (P|dP, psi|q, m, theta)
        fourier[0] *= self.im
        g = self._grid(fourier)
        psi_phi, q_phi = g[0, 0], g[0, 1]
        psi_th, q_th = g[1, 0], g[1, 1]
        values = (psi_phi * q_th - psi_th * q_phi) * self.inv_sin
        X = np.fft.rfft(values, axis=1)[:, : self.nmax + 1]  # (theta, m)
        out = np.einsum("mnt,tm->mn", self.Pw, X) * (-2.0 * math.pi / self.n_phi)
        out[~self.valid] = 0.0
        out[0].imag = 0.0
        return out

    def max_speed(self, h):
        psi = -h * self.inv_lam[None, :]
        fourier = np.einsum("kmnt,mn->kmt", self.tables, psi)
        fourier[0] *= self.im
        g = self._grid(fourier)
        return float(np.sqrt(np.max(g[1] ** 2 + (g[0] * self.inv_sin) ** 2)))

    @staticmethod
    def inner(u, v):
        return float(np.sum((u * np.conj(v)).real))

    def energy(self, h):
        return 0.5 * float(np.sum(np.abs(h) ** 2 * self.inv_lam[None, :]))

    def rk4(self, h, dt):
        k1 = self(h)
        k2 = self(h + 0.5 * dt * k1)
        k3 = self(h + 0.5 * dt * k2)
        k4 = self(h + dt * k3)
        return h + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


_KERNELS = {}


def _kernel(nmax, gamma, dealias=True):
    key = (nmax, float(gamma), bool(dealias))
    if key not in _KERNELS:
        _KERNELS[key] = _Kernel(nmax, gamma, dealias)
    return _KERNELS[key]


def _check_mean(omega, tol=1e-12):
    if abs(omega.coeffs[0]) > tol * max(1.0, float(np.max(np.abs(omega.coeffs)))):
        raise MeanNotZeroError("non-mean-free input")


def step_rk4(omega, dt, gamma, dealias=True):
    """One classical RK4 step."""
    _check_mean(omega)
    k = _kernel(omega.nmax, gamma, dealias)
    return k.to_field(k.rk4(k.to_complex(omega), dt))


def stability_number(omega, dt, gamma, dealias=True):
    """``dt * (U_max (N + 1) + 2 |gamma| a)``; RK4 needs this below ``2 sqrt 2``."""
    k = _kernel(omega.nmax, gamma, dealias)
    u = k.max_speed(k.to_complex(omega))
    return dt * (u * (omega.nmax + 1) + 2.0 * abs(gamma) * A_ROT)


def evolve(omega0, config):
    """Integrate to ``config.T`` with fixed-step RK4.

    Returns
    -------
    omega_T : SpectralField
    diagnostics : Diagnostics
        Energy ``-<Psi, Omega>/2``, enstrophy ``<Omega, Omega>``, mean and
        ``L^2`` drift from the initial state, sampled every
        ``config.sample_every`` steps.

    Raises
    ------
    StabilityError
        When the step fails the RK4 advective bound for the initial state.
    EvolutionBlowup
        On a non-finite state.
    """
    omega0 = omega0.resize(config.nmax)
    _check_mean(omega0)
    k = _kernel(config.nmax, config.gamma, config.dealias)
    h0 = k.to_complex(omega0)
    number = stability_number(omega0, config.dt, config.gamma, config.dealias)
    if number > RK4_LIMIT:
        raise StabilityError(f"dt={config.dt} exceeds the RK4 limit (stability number {number:.3f} > {RK4_LIMIT:.3f})")
    diag = Diagnostics()

    def record(t, h):
        diag.time.append(t)
        diag.energy.append(k.energy(h))
        diag.enstrophy.append(k.inner(h, h))
        diag.mean.append(float(h[0, 0].real))
        diag.drift.append(math.sqrt(max(k.inner(h - h0, h - h0), 0.0)))

    h = h0
    record(0.0, h)
    n = config.n_steps
    for i in range(1, n + 1):
        new = k.rk4(h, config.dt)
        if not np.all(np.isfinite(new)):
            raise EvolutionBlowup(f"non-finite state at step {i}", k.to_field(h), (i - 1) * config.dt)
        h = new
        if i % config.sample_every == 0 or i == n:
            record(i * config.dt, h)
    return k.to_field(h), diag


def travelling_wave_check(params, eps, T=1.0, nmax=24, dt=5e-4, tol=1e-13):
    """Relative mismatch between non-rotating evolution and the rotated initial state.

    ``Omega_bar_0 = Delta(2 gamma Y_1^0 + Psi_eps)`` is evolved with the
    ``gamma = 0`` equation and compared against ``rotate_frame(Omega_bar_0,
    gamma_tilde T)``.
    """
    from .steady import assemble_solution, construct

    if eps == 0.0:
        Psi = params.base_stream(nmax)
    else:
        Psi, _ = assemble_solution(construct(params, eps, nmax=nmax, tol=tol))
    stream = Psi + 2.0 * params.gamma * SpectralField.mode(1, 0, nmax)
    omega0 = laplacian(stream)
    omega0.coeffs[index(0, 0)] = 0.0
    omega_T, _ = evolve(omega0, EvolutionConfig(dt=dt, T=T, gamma=0.0, nmax=nmax))
    target = rotate_frame(omega0, params.gamma_tilde * T)
    return (omega_T - target).l2() / omega0.l2()
