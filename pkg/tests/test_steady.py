import math

import numpy as np
import pytest
from scipy import integrate

from eulersphere.acceptance import reference_slopes
from eulersphere.harmonics import EVEN_COSINE, SpectralField, degree_of, order_of, symmetry_defect
from eulersphere.norms import sobolev_norm
from eulersphere.steady import (
    ConstructionConfig,
    CubicNonlinearity,
    DegenerateSystemError,
    NoContractionError,
    RHParams,
    _solve,
    apply_K,
    assemble_solution,
    c_gamma_beta,
    construct,
    epsilon_sweep,
    f0_f1_reference,
    find_eps_max,
    fixed_point,
    leading_coefficients,
    limit_coefficients,
    linearized_forcing,
    solve_AB,
    steady_residual,
)

PARAMS = [RHParams(1.0, 0.0), RHParams(0.0, 1.0), RHParams(1.0, 1.0), RHParams(0.7, -0.4)]


def sphere_integral(fun):
    """Plain adaptive quadrature over the sphere, for cross checks."""
    val, _ = integrate.dblquad(lambda th, ph: fun(th, ph) * math.sin(th), 0, 2 * math.pi, 0, math.pi, epsabs=1e-13, epsrel=1e-13)
    return val


def y10(th):
    return 0.5 * math.sqrt(3 / math.pi) * math.cos(th)


def y20(th):
    return 0.25 * math.sqrt(5 / math.pi) * (3 * math.cos(th) ** 2 - 1)


def y22(th, ph):
    return 0.25 * math.sqrt(15 / math.pi) * math.sin(th) ** 2 * math.cos(2 * ph)


@pytest.mark.parametrize("p", PARAMS[:3], ids=str)
def test_limit_coefficients_against_adaptive_quadrature(p):
    """At eps = 0 the two compatibility rows are linear in (A, B)."""
    c = c_gamma_beta(p)

    def P(th):
        return p.beta * y20(th) + p.gamma * y10(th)

    # <f(P), Y20> = 0 and <f'(P) Y22, Y22> = 0
    M = np.array(
        [
            [sphere_integral(lambda t, f: P(t) * y20(t)), sphere_integral(lambda t, f: P(t) ** 2 * y20(t))],
            [1.0, sphere_integral(lambda t, f: 2 * P(t) * y22(t, f) ** 2)],
        ]
    )
    rhs = -c * np.array([sphere_integral(lambda t, f: P(t) ** 3 * y20(t)), sphere_integral(lambda t, f: 3 * P(t) ** 2 * y22(t, f) ** 2)])
    a0, b0 = np.linalg.solve(M, rhs)
    assert limit_coefficients(p) == pytest.approx((a0, b0), rel=1e-10, abs=1e-14)
    zero = SpectralField.zeros(8, EVEN_COSINE)
    assert solve_AB(zero, 0.0, p) == pytest.approx((a0, b0), rel=1e-10, abs=1e-14)


@pytest.mark.parametrize("p", PARAMS, ids=str)
def test_f0_f1_closed_forms_match_quadrature(p):
    f0_ref, f1_ref = f0_f1_reference(p)
    f0, f1 = linearized_forcing(p, nmax=8)
    for (n, m), v in f0_ref.items():
        assert abs(f0[n, m] - v) < 1e-14, (n, m)
    for (n, m), v in f1_ref.items():
        assert abs(f1[n, m] - v) < 1e-14, (n, m)
    # no other content
    n_of = degree_of(8)
    mask = (order_of(8) == 2) & (n_of > 6)
    assert np.max(np.abs(f1.coeffs[mask])) < 1e-14


def test_compatibility_removes_kernel_at_leading_order():
    p = RHParams(1.0, 1.0)
    f0, f1 = linearized_forcing(p)
    assert abs(f0[2, 0]) < 1e-14
    assert abs(f1[2, 2]) < 1e-14


def test_params():
    p = RHParams.from_rotation(1.0, 2.0)
    assert p.gamma_tilde == pytest.approx(2.0)
    assert p.size == pytest.approx(1 + 1 + p.gamma**2)
    with pytest.raises(ValueError):
        RHParams(0.0, 0.0).check()
    assert p.base_stream(4).modes() == {(2, 0): 1.0, (1, 0): p.gamma}


def test_cubic_nonlinearity():
    f = CubicNonlinearity(1.0, -2.0, 0.5)
    s = np.linspace(-2, 2, 9)
    assert np.allclose(f(s), f.polynomial(s))
    assert np.allclose(f.derivative(s), f.polynomial.deriv()(s))


def test_config_validation():
    with pytest.raises(ValueError):
        ConstructionConfig(eps=-1.0)
    with pytest.raises(ValueError):
        ConstructionConfig(eps=0.1, nmax=4)
    assert ConstructionConfig(eps=0.1, nmax=10).audit == 30


def test_degenerate_solve():
    with pytest.raises(DegenerateSystemError):
        _solve(np.zeros((2, 2)), np.ones(2))
    with pytest.raises(DegenerateSystemError):
        _solve(np.array([[1.0, 2.0], [2.0, 4.0]]), np.ones(2))


def test_K_preserves_class_and_kernel():
    p = RHParams(1.0, 1.0)
    out = apply_K(SpectralField.zeros(12, EVEN_COSINE), 0.05, p)
    assert out.symmetry == EVEN_COSINE
    assert symmetry_defect(out, EVEN_COSINE) == 0.0
    assert np.all(out.coeffs[degree_of(12) == 2] == 0)
    assert out.l2() > 0


@pytest.fixture(scope="module")
def solution():
    p = RHParams(1.0, 1.0)
    return p, construct(p, 0.05, nmax=16)


def test_construction_converges(solution):
    _, r = solution
    assert r.converged
    assert r.iterations <= 10
    assert max(r.contraction_estimates) < 0.1
    assert max(r.kernel_defects) < 1e-12
    assert r.x_membership.ok and r.ab_bounds_ok
    assert r.to_dict()["converged"] is True


def test_fixed_point_equation(solution):
    p, r = solution
    assert sobolev_norm(apply_K(r.psi, 0.05, p) - r.psi, 2) < 1e-12


def test_steady_residual_small(solution):
    _, r = solution
    assert r.residual_l2 < 1e-13


def test_residual_catches_wrong_profile(solution):
    p, r = solution
    Psi, F = assemble_solution(r)
    assert steady_residual(Psi, F, p.gamma).l2() < 1e-13
    assert steady_residual(Psi, F + 1e-3, p.gamma).l2() > 1e-4
    assert steady_residual(Psi, F, p.gamma + 0.1).l2() > 1e-2


def test_residual_decays_spectrally():
    p = RHParams(1.0, 1.0)
    res = [construct(p, 1.0, nmax=N, tol=1e-14).residual_l2 for N in (8, 12, 16)]
    assert res[0] > 100 * res[1] > 1e4 * res[2]


def test_assemble_solution(solution):
    p, r = solution
    Psi, F = assemble_solution(r)
    assert Psi[2, 0] == p.beta  # psi has no degree-2 content
    assert Psi[1, 0] == pytest.approx(p.gamma + 0.05 * r.psi[1, 0], abs=1e-16)
    assert Psi[2, 2] == pytest.approx(0.05)
    assert F.coef[1] == pytest.approx(-6 + 0.05 * r.nonlinearity.A)


def test_ab_converge_to_limit():
    p = RHParams(1.0, 1.0)
    a0, b0 = limit_coefficients(p)
    r = construct(p, 1e-3, nmax=12)
    assert r.nonlinearity.A == pytest.approx(a0, rel=1e-2)
    assert r.nonlinearity.B == pytest.approx(b0, rel=1e-2)


@pytest.mark.parametrize("b,g", [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)])
def test_leading_slopes(b, g):
    p = RHParams(b, g)
    eps = 1e-3
    r = construct(p, eps, nmax=16)
    lead = leading_coefficients(p)
    c = c_gamma_beta(p)
    for key in ((6, 2), (4, 2)):
        assert abs(r.psi[key] / eps - lead[key]) < 1e-2 * max(abs(lead[key]), 1e-3 * c)


def test_corrected_y42_display_matches_construction():
    """The Y_4^2 slope needs the sqrt(3) factor in the second term."""
    p = RHParams(1.0, 1.0)
    lead = leading_coefficients(p)
    fixed = reference_slopes(1.0, 1.0, corrected=True)
    printed = reference_slopes(1.0, 1.0)
    assert fixed[(4, 2)] == pytest.approx(lead[(4, 2)], rel=1e-12)
    assert fixed[(6, 2)] == pytest.approx(lead[(6, 2)], rel=1e-12)
    assert abs(printed[(4, 2)] - lead[(4, 2)]) > abs(lead[(4, 2)])


def test_zonal_beta_only_has_no_odd_modes():
    r = construct(RHParams(1.0, 0.0), 0.05, nmax=12)
    odd = (degree_of(12) % 2 == 1) & (r.psi.coeffs != 0)
    assert np.max(np.abs(r.psi.coeffs[odd]), initial=0.0) < 1e-15


def test_no_contraction_far_out():
    with pytest.raises(NoContractionError) as info:
        fixed_point(ConstructionConfig(eps=50.0, nmax=8, max_iter=30), RHParams(1.0, 1.0))
    assert info.value.result is not None


def test_find_eps_max_brackets():
    p = RHParams(1.0, 1.0)
    assert find_eps_max(p, eps_hi=0.5, nmax=8) == 0.5
    e = find_eps_max(p, eps_hi=50.0, nmax=8, steps=6)
    assert 0 < e < 50
    fixed_point(ConstructionConfig(eps=e, nmax=8), p)


def test_epsilon_sweep():
    p = RHParams(1.0, 0.0)
    sweep = epsilon_sweep(p, [4e-3, 2e-3, 1e-3], nmax=12)
    lead = leading_coefficients(p)
    assert len(sweep.rows) == 3 and not sweep.failures
    assert sweep.slopes[(6, 2)] == pytest.approx(lead[(6, 2)], rel=1e-4)
    assert sweep.slope_errors[(6, 2)] < 1e-4 * abs(lead[(6, 2)])
    d = sweep.to_dict()
    assert set(d["slopes"]) == {"Y62", "Y42"}


def test_epsilon_sweep_records_failures():
    sweep = epsilon_sweep(RHParams(1.0, 1.0), [1e-3, 80.0], nmax=8)
    assert len(sweep.rows) == 1 and len(sweep.failures) == 1
    assert "no contraction" in sweep.failures[0]["error"]
