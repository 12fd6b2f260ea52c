import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import factorial, lpmv

from conftest import random_field
from eulersphere.harmonics import (
    EVEN_COSINE,
    FULL,
    KernelObstructionError,
    MeanNotZeroError,
    ResolutionError,
    SpectralField,
    analyze,
    d_phi,
    degree_of,
    eigenvalues,
    gauss_grid,
    index,
    invert_laplacian,
    invert_shifted_helmholtz,
    jacobian,
    laplacian,
    legendre_table,
    n_coeffs,
    product_grid,
    project_out_degree,
    project_symmetry,
    synthesize,
    ylm,
)

A = 0.5 * math.sqrt(3 / math.pi)


def theta_oracle(n, m, theta):
    # scipy's lpmv carries the Condon-Shortley phase; the basis does not
    m = abs(m)
    norm = math.sqrt((2 * n + 1) / (4 * math.pi) * factorial(n - m, exact=True) / factorial(n + m, exact=True))
    val = (-1) ** m * norm * lpmv(m, n, np.cos(theta))
    return val * (math.sqrt(2) if m else 1.0)


def test_layout():
    assert index(0, 0) == 0
    assert index(2, -2) == 4 and index(2, 2) == 8
    assert n_coeffs(24) == 625
    assert list(degree_of(2)) == [0, 1, 1, 1, 2, 2, 2, 2, 2]


def test_closed_forms():
    th = np.array([0.3, 1.1, 2.5])
    ph = np.array([0.2, 1.7, 4.0])
    s, c = np.sin(th), np.cos(th)
    assert np.allclose(ylm(1, 1, th, ph), math.sqrt(3 / (4 * math.pi)) * s * np.cos(ph), atol=1e-15)
    assert np.allclose(ylm(1, 0, th, ph), A * c, atol=1e-15)
    assert np.allclose(ylm(2, 0, th, ph), 0.25 * math.sqrt(5 / math.pi) * (3 * c * c - 1), atol=1e-15)
    assert np.allclose(ylm(2, 2, th, ph), 0.25 * math.sqrt(15 / math.pi) * s * s * np.cos(2 * ph), atol=1e-15)
    assert np.allclose(ylm(2, -1, th, ph), 0.5 * math.sqrt(15 / math.pi) * s * c * np.sin(ph), atol=1e-15)


def test_legendre_against_scipy():
    theta = np.linspace(0.05, math.pi - 0.05, 37)
    P, _ = legendre_table(20, theta)
    for n in range(21):
        for m in range(n + 1):
            assert np.allclose(P[m, n], theta_oracle(n, m, theta), rtol=1e-11, atol=1e-13), (n, m)


def test_legendre_derivative_and_ode():
    theta = gauss_grid(30, 1).theta
    P, dP = legendre_table(20, theta)
    h = 1e-6
    Pp, _ = legendre_table(20, theta + h)
    Pm, _ = legendre_table(20, theta - h)
    assert np.max(np.abs((Pp - Pm) / (2 * h) - dP)) < 1e-7
    # (1/sin) d/dtheta (sin dP) - m^2/sin^2 P = -n(n+1) P, derivative of sin*dP by finite differences
    s = np.sin(theta)
    _, dPp = legendre_table(20, theta + h)
    _, dPm = legendre_table(20, theta - h)
    lhs = (np.sin(theta + h) * dPp - np.sin(theta - h) * dPm) / (2 * h) / s
    for m in range(0, 21):
        for n in range(m, 21):
            resid = lhs[m, n] - m * m / s**2 * P[m, n] + n * (n + 1) * P[m, n]
            assert np.max(np.abs(resid)) < 1e-5 * (n + 1) ** 2


def test_grid_weights_and_nodes():
    g = gauss_grid(12, 25)
    assert abs(g.weights.sum() - 2.0) < 1e-14
    assert np.all(np.diff(g.theta) > 0)
    assert np.all(g.sin_theta > 0)
    assert abs(g.integrate(np.ones(g.shape)) - 4 * math.pi) < 1e-13


def test_synthesize_zero_and_constant():
    g = product_grid(8)
    assert np.all(synthesize(SpectralField.zeros(8), g) == 0)
    assert np.allclose(synthesize(SpectralField.mode(0, 0), g), 1 / (2 * math.sqrt(math.pi)), atol=1e-15)


def test_synthesize_against_pointwise():
    g = product_grid(10, 10)
    u = SpectralField.from_modes({(3, 2): 0.7, (5, -4): -1.2, (1, 0): 0.3}, nmax=6)
    th, ph = g.mesh()
    ref = 0.7 * ylm(3, 2, th, ph) - 1.2 * ylm(5, -4, th, ph) + 0.3 * ylm(1, 0, th, ph)
    assert np.max(np.abs(synthesize(u, g) - ref)) < 1e-14


def test_round_trip(rng):
    u = random_field(rng, 16, decay=0.0)
    g = product_grid(16, 16)
    assert (analyze(synthesize(u, g), g, 16) - u).l2() < 1e-12


def test_analyze_single_mode():
    g = product_grid(6, 6)
    out = analyze(synthesize(SpectralField.mode(3, 2, 6), g), g, 6)
    assert abs(out[3, 2] - 1) < 1e-13
    rest = np.delete(out.coeffs, index(3, 2))
    assert np.max(np.abs(rest)) < 1e-13


def test_gram_matrix():
    N = 20
    g = product_grid(2 * N, 0)
    B = np.array([synthesize(SpectralField.mode(int(n), int(m), N), g).ravel()
                  for n in range(N + 1) for m in range(-n, n + 1)])
    w = np.repeat(g.weights, g.n_phi) * 2 * math.pi / g.n_phi
    assert np.max(np.abs((B * w) @ B.T - np.eye(len(B)))) < 1e-12


def test_parseval(rng):
    u = random_field(rng, 12)
    g = product_grid(24, 0)
    assert abs(math.sqrt(g.integrate(synthesize(u, g) ** 2)) - u.l2()) < 1e-12


def test_analyze_warns_on_aliasing():
    g = gauss_grid(5, 11)
    with pytest.warns(RuntimeWarning, match="aliased"):
        analyze(np.zeros(g.shape), g, 4, content_degree=12)


def test_resolution_error():
    with pytest.raises(ResolutionError):
        synthesize(SpectralField.zeros(10), gauss_grid(4, 9))


def test_laplacian_and_inverse(rng):
    assert laplacian(SpectralField.mode(0, 0)).l2() == 0
    assert np.allclose(laplacian(SpectralField.mode(3, 1)).coeffs, -12 * SpectralField.mode(3, 1).coeffs)
    u = random_field(rng, 10, mean_free=True)
    assert (invert_laplacian(laplacian(u)) - u).l2() < 1e-13
    with pytest.raises(MeanNotZeroError, match="non-mean-free"):
        invert_laplacian(SpectralField.mode(0, 0))


def test_shifted_helmholtz():
    out = invert_shifted_helmholtz(SpectralField.mode(6, 2), 2)
    assert abs(out[6, 2] - 1 / (6 - 42)) < 1e-16
    with pytest.raises(KernelObstructionError, match="kernel obstruction"):
        invert_shifted_helmholtz(SpectralField.mode(2, 0), 2)


def test_d_phi_against_grid():
    g = product_grid(8, 8)
    th, ph = g.mesh()
    # d/dphi of Theta_2^2 cos(2 phi) = -2 Theta_2^2 sin(2 phi)
    got = synthesize(d_phi(SpectralField.mode(2, 2)), g)
    assert np.max(np.abs(got + 2 * ylm(2, -2, th, ph))) < 1e-14
    assert d_phi(d_phi(SpectralField.mode(2, 2))).modes(1e-15) == {(2, 2): -4.0}
    zonal = SpectralField.from_modes({(3, 0): 1.0, (1, 0): 2.0})
    assert d_phi(zonal).l2() == 0


def test_d_phi_squared_is_minus_m2(rng):
    u = random_field(rng, 8)
    from eulersphere.harmonics import order_of

    assert np.allclose(d_phi(d_phi(u)).coeffs, -(order_of(8) ** 2) * u.coeffs, atol=1e-14)


def test_jacobian_rotation_field(rng):
    q = random_field(rng, 10)
    out = jacobian(SpectralField.mode(1, 0), q, nmax_out=10)
    assert (out - A * d_phi(q)).l2() < 1e-12


def test_jacobian_against_grid_formula():
    # J(Y_1^1, Y_1^0) on a grid: psi = k sin cos(phi), q = a cos
    g = product_grid(6, 6)
    th, ph = g.mesh()
    k = math.sqrt(3 / (4 * math.pi))
    ref = (1 / np.sin(th)) * (-k * np.sin(th) * np.sin(ph) * (-A * np.sin(th)))
    out = jacobian(SpectralField.mode(1, 1), SpectralField.mode(1, 0), nmax_out=4)
    assert np.max(np.abs(synthesize(out, g) - ref)) < 1e-14


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**31), st.integers(min_value=2, max_value=12))
def test_jacobian_antisymmetry_and_mean(seed, nmax):
    r = np.random.default_rng(seed)
    psi, q = random_field(r, nmax), random_field(r, nmax)
    assert jacobian(psi, psi).l2() < 1e-11
    assert (jacobian(psi, q) + jacobian(q, psi)).l2() < 1e-11
    assert abs(jacobian(psi, q).mean) < 1e-11


def test_projections():
    u = SpectralField.from_modes({(3, 1): 1.0, (4, 2): 1.0})
    assert project_symmetry(u, EVEN_COSINE).modes() == {(4, 2): 1.0}
    v = SpectralField.from_modes({(2, 0): 1.0, (6, 2): 1.0})
    assert project_out_degree(v, 2).modes() == {(6, 2): 1.0}
    once = project_symmetry(u, EVEN_COSINE)
    assert np.array_equal(project_symmetry(once, EVEN_COSINE).coeffs, once.coeffs)
    assert project_symmetry(u, FULL).modes() == u.modes()
    with pytest.raises(ValueError):
        project_symmetry(u, "odd")


def test_eigenvalues():
    assert list(eigenvalues(1)) == [0.0, 2.0, 2.0, 2.0]


def test_json_round_trip(rng):
    u = random_field(rng, 6)
    text = u.to_json()
    assert '"max_degree": 6' in text
    back = SpectralField.from_json(text)
    assert np.array_equal(back.coeffs, u.coeffs)
    assert back.symmetry == u.symmetry
