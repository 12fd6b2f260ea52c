import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_field
from eulersphere.dynamics import tendency
from eulersphere.harmonics import MeanNotZeroError, SpectralField, d_phi, laplacian
from eulersphere.rigidity import (
    A_CONST,
    RigidityParams,
    coercivity_constant,
    degree1_excluded_constant,
    linearized_RH,
    linearized_rigid,
    multiplier,
    rigidity_report,
    single_mode_multiplier_defect,
    spectral_condition_gap,
)
from eulersphere.steady import RHParams


def test_constant():
    assert A_CONST == pytest.approx(math.sqrt(3 / math.pi) / 2, rel=1e-16)
    with pytest.raises(ValueError):
        RigidityParams(0.0)


@pytest.mark.parametrize("p", [RigidityParams(1.0), RigidityParams(2.0, 0.3, -0.5), RigidityParams(-1.3, 0.1, 0.4)])
def test_operator_diagonal(p):
    assert single_mode_multiplier_defect(p, nmax=12) < 1e-14


def test_operator_matches_linearized_tendency(rng):
    """About Omega = Delta(alpha Y_1^0), the linearized tendency is -L in a frame moving at c."""
    alpha, gamma, c = 1.3, 0.4, 0.0
    p = RigidityParams(alpha, c, gamma)
    base = laplacian(alpha * SpectralField.mode(1, 0, 8))
    w = random_field(rng, 8, mean_free=True)
    h = 1e-3
    diff = (tendency(base + h * w, gamma) - tendency(base - h * w, gamma)) * (0.5 / h)
    assert (diff + linearized_rigid(w, p)).l2() < 1e-12


def test_multiplier_values():
    p = RigidityParams(1.0)
    assert multiplier(p, 1) == pytest.approx(0.0, abs=1e-16)
    assert multiplier(p, 2) == pytest.approx(2 * A_CONST / 3)
    assert np.allclose(multiplier(p, np.array([1, 2])), [0, 2 * A_CONST / 3], atol=1e-16)


def test_gap_scan_alpha_equals_gamma():
    scan = spectral_condition_gap(RigidityParams(1.0, 0.0, 1.0), 20)
    assert scan.violations == [2]
    assert scan.root_lambda == pytest.approx(6.0)
    assert scan.finite_check
    assert scan.rows()[1] == (2, pytest.approx(0.0, abs=1e-14), True)


def test_gap_scan_degenerate_and_quasi():
    p = RigidityParams(1.0, A_CONST, 0.0)
    scan = spectral_condition_gap(p, 10)
    assert not scan.finite_check and scan.root_lambda is None and scan.violations == []
    near = RigidityParams(1.0, 0.0, 1.0 + 1e-8)
    assert spectral_condition_gap(near, 5).quasi_resonances == [2]
    with pytest.raises(ValueError):
        spectral_condition_gap(p, 0)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 5), st.floats(-2, 2), st.floats(-2, 2))
def test_gap_is_minus_lambda_times_multiplier(alpha, c, gamma):
    p = RigidityParams(alpha, c, gamma)
    scan = spectral_condition_gap(p, 15)
    lam = scan.n * (scan.n + 1.0)
    assert np.allclose(scan.gaps, -lam * multiplier(p, scan.n), rtol=1e-12, atol=1e-12)


def test_coercivity_off_degree1():
    p = RigidityParams(2.0)
    full = coercivity_constant(p, 30)
    assert full.C1 == math.inf and full.argmax_degree == 1
    excl = coercivity_constant(p, 30, excluded={(1, 1), (1, -1)})
    assert excl.C1 == pytest.approx(degree1_excluded_constant(2.0), rel=1e-14)
    assert excl.argmax_degree == 2
    assert excl.limit == pytest.approx(1 / (2 * A_CONST))
    assert excl.C1_all_degrees == pytest.approx(excl.C1)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31))
def test_coercivity_bound_holds_on_random_fields(seed):
    r = np.random.default_rng(seed)
    p = RigidityParams(1.5, 0.2, 0.3)
    C = coercivity_constant(p, 10)
    w = random_field(r, 10, decay=0.0, mean_free=True)
    assert d_phi(w).l2() <= C.C1 * linearized_rigid(w, p).l2() * (1 + 1e-12)


def test_coercivity_divergent():
    r = coercivity_constant(RigidityParams(1.0, A_CONST), 10)
    assert r.diverges and r.limit == math.inf and r.C1_all_degrees == math.inf


def test_linearized_rigid_mean_check():
    with pytest.raises(MeanNotZeroError):
        linearized_rigid(SpectralField.mode(0, 0, 3), RigidityParams(1.0))


def test_linearized_RH_matches_tendency(rng):
    rh = RHParams(0.8, 0.5)
    base = laplacian(rh.base_stream(8))
    w = random_field(rng, 8, mean_free=True)
    h = 1e-3
    tp = tendency(base + h * w, rh.gamma, nmax_out=9)
    tm = tendency(base - h * w, rh.gamma, nmax_out=9)
    out = linearized_RH(w, rh)
    assert out.nmax == 9
    assert ((tp - tm) * (0.5 / h) + out).l2() < 1e-12


@pytest.mark.parametrize(
    "p,regime",
    [
        (RigidityParams(1.0, 0.0, 1.0), "flexible-rotating"),
        (RigidityParams(1.0, 2 * A_CONST / 3, 0.0), "flexible-travelling"),
        (RigidityParams(1.0), "conditionally-rigid"),
        (RigidityParams(1.0, A_CONST, 0.5), "degenerate"),
        (RigidityParams(1.0, 0.1, 0.3), "rigid"),
    ],
)
def test_regimes(p, regime):
    rep = rigidity_report(p, N=20)
    assert rep["regime"] == regime, rep["verdict"]


def test_resonant_regime():
    # choose c so that lambda_3 = 12 is the root
    alpha, gamma = 1.0, 0.7
    c = A_CONST * alpha - 2 * A_CONST * (alpha + 2 * gamma) / 12
    rep = rigidity_report(RigidityParams(alpha, c, gamma), N=10)
    assert rep["regime"] == "resonant" and rep["violations"] == [3]


def test_report_flags_printed_constant():
    rep = rigidity_report(RigidityParams(1.0), N=10)
    cc = rep["degree1_excluded"]
    assert cc["computed"] == pytest.approx(3 / (2 * A_CONST))
    assert cc["discrepancy"] is True
    assert rep["C1_excluding_degree1"]["C1"] == pytest.approx(cc["computed"])
