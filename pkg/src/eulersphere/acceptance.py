"""Acceptance suite: twelve numbered criteria plus a quick tier of exact checks.

Each criterion returns a ``CriterionResult``; nothing here loosens a
tolerance to make a check pass.  Reference values are either closed forms
typed in below or computed by an independent route (grid formulas instead
of spectral multipliers, closed forms instead of quadrature).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import dynamics, gaunt, harmonics, norms, rigidity, steady
from .harmonics import SpectralField, degree_of, order_of

__all__ = [
    "CRITERIA",
    "CriterionResult",
    "run_acceptance",
    "run_quick",
    "reference_slopes",
]

PI = math.pi
SLOPE_CASES = ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0))


@dataclass
class CriterionResult:
    number: int | str
    name: str
    passed: bool
    detail: str = ""
    metrics: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:>2} {self.name}: {self.detail} ({self.seconds:.1f} s)"

    def to_dict(self):
        return {
            "number": self.number,
            "name": self.name,
            "passed": bool(self.passed),
            "detail": self.detail,
            "metrics": _jsonable(self.metrics),
            "seconds": self.seconds,
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if math.isfinite(v) else str(v)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


# ---------------------------------------------------------------- 1
def _laplacian_by_grid(n, m, nmax):
    """``Delta Y_n^m`` on a grid from ``(1/sin)d_theta(sin d_theta) - m^2/sin^2``.

    ``sin(theta) d_theta Y`` is band limited (degree ``n + 1``), so it is
    re-expanded exactly and differentiated once more; no eigenvalue enters.
    """
    grid = harmonics.gauss_grid(nmax + 2, 2 * nmax + 4)
    t = harmonics.get_transform(nmax + 1, grid.n_theta, grid.n_phi)
    y = SpectralField.mode(n, m, nmax + 1)
    s = grid.sin_theta[:, None]
    g = harmonics.analyze(s * t.synthesize_dtheta(y.coeffs), grid, nmax + 1)
    values = t.synthesize_dtheta(g.coeffs) / s - (m * m) * t.synthesize(y.coeffs) / s**2
    return values, t.synthesize(y.coeffs)


def criterion_1():
    N = 24
    grid = harmonics.product_grid(2 * N, 0)
    t = harmonics.get_transform(N, grid.n_theta, grid.n_phi)
    k = harmonics.n_coeffs(N)
    basis = np.empty((k, grid.n_theta * grid.n_phi))
    for i in range(k):
        e = np.zeros(k)
        e[i] = 1.0
        basis[i] = t.synthesize(e).ravel()
    w = np.repeat(grid.weights, grid.n_phi) * (2.0 * PI / grid.n_phi)
    gram = (basis * w) @ basis.T
    gram_err = float(np.max(np.abs(gram - np.eye(k))))
    eig_err = 0.0
    for n in range(0, 21):
        for m in range(-n, n + 1):
            lap, y = _laplacian_by_grid(n, m, 20)
            eig_err = max(eig_err, float(np.max(np.abs(lap + n * (n + 1) * y))))
    ok = gram_err <= 1e-12 and eig_err <= 1e-10
    return ok, f"Gram error {gram_err:.2e} (<= 1e-12), eigenrelation {eig_err:.2e} (<= 1e-10)", {
        "gram_error": gram_err,
        "eigen_error": eig_err,
    }


# ---------------------------------------------------------------- 2
def _published_tables(b, g):
    first = {
        (4, 2): b / 14.0 * math.sqrt(15.0 / PI),
        (3, 2): g / 2.0 * math.sqrt(3.0 / (7.0 * PI)),
        (2, 2): -b / 7.0 * math.sqrt(5.0 / PI),
    }
    second = {
        (6, 2): b * b * 15.0 / (11.0 * PI * math.sqrt(182.0)),
        (5, 2): b * g / (2.0 * PI) * math.sqrt(15.0 / 77.0),
        (4, 2): math.sqrt(3.0) / (154.0 * PI) * (11.0 * g * g - 5.0 * b * b),
        (2, 2): (3.0 * g * g + 5.0 * b * b) / (28.0 * PI),
    }
    return first, second


def criterion_2():
    worst, extra = 0.0, 0.0
    for b, g in ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (0.7, -1.3)):
        first, second = gaunt.rh_product_tables(b, g)
        ref1, ref2 = _published_tables(b, g)
        for got, ref in ((first, ref1), (second, ref2)):
            for key, val in ref.items():
                worst = max(worst, abs(got[key] - val))
            others = {k: v for k, v in got.modes(0.0).items() if k not in ref}
            extra = max([extra] + [abs(v) for v in others.values()])
    ok = worst <= 1e-12 and extra <= 1e-12
    return ok, f"max coefficient error {worst:.2e}, spurious modes {extra:.2e} (<= 1e-12)", {
        "max_error": worst,
        "spurious": extra,
    }


# ---------------------------------------------------------------- 3
def criterion_3():
    rng = np.random.default_rng(20240603)
    worst = 0.0
    for _ in range(10):
        b, g = rng.uniform(-2.0, 2.0, size=2)
        p = steady.RHParams(float(b), float(g))
        A, B = steady.solve_AB(SpectralField.zeros(12, harmonics.EVEN_COSINE), 0.0, p)
        a0, b0 = steady.limit_coefficients(p)
        worst = max(worst, abs(A - a0) / max(1.0, abs(a0)), abs(B - b0) / max(1.0, abs(b0)))
    eps = (1e-2, 5e-3, 2.5e-3)
    rates = {}
    rate_ok = True
    for b, g in SLOPE_CASES:
        p = steady.RHParams(b, g)
        a0, _ = steady.limit_coefficients(p)
        d = np.array([steady.construct(p, e, nmax=24).nonlinearity.A - a0 for e in eps])
        # quadratic through the three points: a vanishing intercept means d = O(eps)
        coef = np.polyfit(np.array(eps), d, 2)
        intercept = float(coef[-1])
        bounded = float(np.max(np.abs(d) / np.array(eps)))
        ok_here = abs(intercept) <= 1e-2 * float(np.max(np.abs(d))) and bounded <= 1.0
        rates[f"{b},{g}"] = {"diffs": d.tolist(), "intercept": intercept, "max_diff_over_eps": bounded}
        rate_ok &= ok_here
    ok = worst <= 1e-12 and rate_ok
    return ok, f"closed-form error {worst:.2e} (<= 1e-12); A - a0 = O(eps): {rate_ok}", {
        "closed_form_error": worst,
        "rates": rates,
    }


# ---------------------------------------------------------------- 4
def reference_slopes(b, g, corrected=False):
    """Leading slopes of ``<psi_eps, Y_6^2>`` and ``<psi_eps, Y_4^2>`` as displayed.

    ``corrected=True`` restores the factor ``sqrt(3)`` that the ``Y_4^2``
    display drops from its second term (the value implied by the ``f_1``
    coefficients).
    """
    c = 0.5 / (1.0 + g * g + b * b) ** 2
    s62 = -b * b / 36.0 * 45.0 / (11.0 * PI * math.sqrt(182.0)) * c
    second = b * b / (7.0 * PI) * 30.0 * g * g / (7.0 * g * g + 15.0 * b * b)
    if corrected:
        second *= math.sqrt(3.0)
    s42 = -(1.0 / 14.0) * (3.0 * math.sqrt(3.0) / (154.0 * PI) * (11.0 * g * g - 5.0 * b * b) - second) * c
    return {(6, 2): s62, (4, 2): s42}


def _slope_ok(measured, ref, scale):
    if ref == 0.0:
        return abs(measured) <= 1e-2 * scale
    return abs(measured - ref) <= 1e-2 * abs(ref)


def criterion_4():
    eps = (4e-3, 2e-3, 1e-3)
    ok = True
    metrics, notes = {}, []
    for b, g in SLOPE_CASES:
        p = steady.RHParams(b, g)
        sweep = steady.epsilon_sweep(p, eps, nmax=24)
        ref = reference_slopes(b, g)
        fixed = reference_slopes(b, g, corrected=True)
        c = steady.c_gamma_beta(p)
        scale = 45.0 / (36.0 * 11.0 * PI * math.sqrt(182.0)) * c
        case = {}
        for key in ((6, 2), (4, 2)):
            got = sweep.slopes[key]
            good = _slope_ok(got, ref[key], scale)
            ok &= good
            case[f"Y{key[0]}{key[1]}"] = {
                "measured": got,
                "error_bar": sweep.slope_errors[key],
                "display": ref[key],
                "corrected": fixed[key],
                "matches_display": good,
                "matches_corrected": _slope_ok(got, fixed[key], scale),
            }
            if not good:
                notes.append(
                    f"({b:g},{g:g}) Y{key[0]}{key[1]}: measured {got:.6e}, display {ref[key]:.6e}, "
                    f"corrected {fixed[key]:.6e}"
                )
        metrics[f"{b:g},{g:g}"] = case
    detail = "all slopes within 1% of the displays" if ok else "; ".join(notes)
    return ok, detail, metrics


# ---------------------------------------------------------------- 5
def criterion_5():
    ok = True
    worst_excess, max_iter = -math.inf, 0
    for b, g in SLOPE_CASES:
        p = steady.RHParams(b, g)
        for e in (1e-3, 5e-3, 1e-2, 2e-2):
            r = steady.construct(p, e, nmax=24, tol=1e-13)
            bound = 0.5 + 10.0 * e
            ratio = max(r.contraction_estimates, default=0.0)
            worst_excess = max(worst_excess, ratio - bound)
            max_iter = max(max_iter, r.iterations)
            ok &= ratio <= bound and r.iterations <= 30 and r.converged
    return ok, f"max ratio minus bound {worst_excess:.3f} (<= 0); max iterations {max_iter} (<= 30)", {
        "max_excess": worst_excess,
        "max_iterations": max_iter,
    }


# ---------------------------------------------------------------- 6
def criterion_6():
    ok = True
    metrics = {}
    for b, g in SLOPE_CASES:
        p = steady.RHParams(b, g)
        r16 = steady.construct(p, 0.05, nmax=16).residual_l2
        r24 = steady.construct(p, 0.05, nmax=24).residual_l2
        small = steady.construct(p, 0.01, nmax=24).residual_l2
        drop = r16 / r24 if r24 > 0 else math.inf
        good = drop >= 10.0 and small <= 1e-10
        ok &= good
        metrics[f"{b:g},{g:g}"] = {"N16": r16, "N24": r24, "drop": drop, "eps001_N24": small}
    worst_drop = min(m["drop"] for m in metrics.values())
    worst_small = max(m["eps001_N24"] for m in metrics.values())
    detail = f"min drop 16->24 {worst_drop:.2f}x (>= 10); residual at eps=0.01 {worst_small:.2e} (<= 1e-10)"
    if worst_drop < 10.0:
        detail += f"; residual already at round-off at N=16 ({max(m['N16'] for m in metrics.values()):.1e})"
    return ok, detail, metrics


# ---------------------------------------------------------------- 7
LAM_GRID = np.round(np.arange(0.01, 10.0, 0.01), 10)


def criterion_7():
    ok = True
    metrics = {}
    for b, g in SLOPE_CASES:
        p = steady.RHParams(b, g)
        bound = 400.0 * p.size**2
        lams = []
        for e in (1e-3, 5e-3, 1e-2, 2e-2):
            r = steady.construct(p, e, nmax=24)
            lams.append(norms.analyticity_profile(r.psi, bound, LAM_GRID))
        ref = lams[0]
        stable = ref > 0 and all(abs(x - ref) <= 0.2 * ref for x in lams)
        ok &= stable and min(lams) > 0
        metrics[f"{b:g},{g:g}"] = lams
    spread = {k: (min(v), max(v)) for k, v in metrics.items()}
    return ok, f"lambda range per case {spread}", {"lambdas": metrics}


# ---------------------------------------------------------------- 8
def criterion_8():
    rng = np.random.default_rng(7)
    N = 16
    n = degree_of(N)
    w = SpectralField(rng.standard_normal(harmonics.n_coeffs(N)) * np.exp(-0.3 * n), N)
    w.coeffs[0] = 0.0
    _, diag = dynamics.evolve(w, dynamics.EvolutionConfig(dt=1e-3, T=10.0, gamma=0.5, nmax=N, sample_every=50))
    e_rel, z_rel = diag.relative_change("energy"), diag.relative_change("enstrophy")
    zonal = SpectralField(np.where(order_of(N) == 0, rng.standard_normal(harmonics.n_coeffs(N)), 0.0), N)
    zonal.coeffs[0] = 0.0
    zT, _ = dynamics.evolve(zonal, dynamics.EvolutionConfig(dt=1e-2, T=1.0, gamma=0.8, nmax=N))
    zonal_err = float(np.max(np.abs(zT.coeffs - zonal.coeffs)))
    p = steady.RHParams(1.0, 1.0)
    r = steady.construct(p, 0.02, nmax=24)
    Psi, _ = steady.assemble_solution(r)
    om = harmonics.laplacian(Psi)
    _, d2 = dynamics.evolve(om, dynamics.EvolutionConfig(dt=1e-3, T=1.0, gamma=p.gamma, nmax=24, sample_every=100))
    drift = d2.drift[-1]
    ok = e_rel <= 1e-8 and z_rel <= 1e-8 and zonal_err == 0.0 and drift <= 100.0 * r.residual_l2
    return ok, (
        f"energy {e_rel:.1e}, enstrophy {z_rel:.1e} (<= 1e-8); zonal change {zonal_err:.1e} (== 0); "
        f"drift {drift:.1e} vs 100 x residual {100 * r.residual_l2:.1e}"
    ), {"energy": e_rel, "enstrophy": z_rel, "zonal": zonal_err, "drift": drift, "residual": r.residual_l2}


# ---------------------------------------------------------------- 9
def criterion_9():
    err = dynamics.travelling_wave_check(steady.RHParams(0.0, 1.0), 0.02, T=1.0, nmax=24, dt=5e-4)
    return err <= 1e-4, f"relative error {err:.2e} (<= 1e-4)", {"error": err}


# ---------------------------------------------------------------- 10
def criterion_10():
    a = rigidity.A_CONST
    rot_viol = rigidity.spectral_condition_gap(rigidity.RigidityParams(1.0, 0.0, 1.0), 100).violations
    eta = 1.0
    travel_viol = rigidity.spectral_condition_gap(
        rigidity.RigidityParams(3.0 * math.sqrt(PI / 3.0) * eta, eta, 0.0), 100
    ).violations
    gen = rigidity.RigidityParams(1.0, 0.3, 0.0)
    Ngen = 20
    gscan = rigidity.spectral_condition_gap(gen, 100)
    coer = rigidity.coercivity_constant(gen, Ngen)
    rng = np.random.default_rng(11)
    m = order_of(Ngen)
    worst = 0.0
    for _ in range(200):
        w = SpectralField(np.where(m != 0, rng.standard_normal(len(m)), 0.0), Ngen)
        lhs = harmonics.d_phi(w).l2()
        rhs = rigidity.linearized_rigid(w, gen).l2()
        worst = max(worst, lhs / (coer.C1 * rhs))
    w = SpectralField.mode(coer.argmax_degree, 1, Ngen)
    equality = harmonics.d_phi(w).l2() / rigidity.linearized_rigid(w, gen).l2() / coer.C1
    excl = rigidity.coercivity_constant(rigidity.RigidityParams(1.0, 0.0, 0.0), 50, excluded={(1, 1), (1, -1)})
    c3_ref = 3.0 / (2.0 * a * 1.0)
    report = rigidity.rigidity_report(rigidity.RigidityParams(1.0, 0.0, 0.0), 50)
    flagged = report["degree1_excluded"]["discrepancy"]
    ok = (
        rot_viol == [2]
        and travel_viol == [2]
        and not gscan.violations
        and math.isfinite(coer.C1_all_degrees)
        and worst <= 1.0 + 1e-12
        and abs(equality - 1.0) <= 1e-2
        and abs(excl.C1 - c3_ref) <= 1e-12 * c3_ref
        and flagged
    )
    return ok, (
        f"violations {rot_viol} and {travel_viol}; generic C1 {coer.C1:.4f} with worst ratio {worst:.4f} and "
        f"equality {equality:.6f}; off-degree-1 C1 {excl.C1:.12f} vs 3/(2 a alpha) {c3_ref:.12f} "
        f"(printed {report['degree1_excluded']['printed']:.6f}, flagged)"
    ), {
        "violations_alpha_eq_gamma": rot_viol,
        "violations_travelling": travel_viol,
        "C1_generic": coer.C1,
        "worst_ratio": worst,
        "equality": equality,
        "C1_off_degree1": excl.C1,
        "off_degree1_reference": c3_ref,
        "printed_constant": report["degree1_excluded"]["printed"],
    }


# ---------------------------------------------------------------- 11
def criterion_11():
    N = 8
    kernel_max, other_min = 0.0, math.inf
    n_of, m_of = degree_of(N), order_of(N)
    for b, g in SLOPE_CASES:
        p = steady.RHParams(b, g)
        for k in range(1, len(n_of)):
            n, m = int(n_of[k]), int(m_of[k])
            val = rigidity.linearized_RH(SpectralField.mode(n, m, N), p).l2()
            if m == 0 or n == 2:
                kernel_max = max(kernel_max, val)
            else:
                other_min = min(other_min, val)
    ok = kernel_max <= 1e-12 and other_min >= 1e-3
    return ok, f"kernel modes {kernel_max:.1e} (<= 1e-12); other modes >= {other_min:.3f} (>= 1e-3)", {
        "kernel_max": kernel_max,
        "other_min": other_min,
    }


# ---------------------------------------------------------------- 12
GAUNT_FAMILY = {"s^2": [0, 0, 1], "s^3": [0, 0, 0, 1], "s^4": [0, 0, 0, 0, 1], "s^5-s^2": [0, 0, -1, 0, 0, 1]}


def criterion_12():
    ok = True
    consts = {}
    for n in range(1, 6):
        ratios = {}
        for name, f in GAUNT_FAMILY.items():
            r = gaunt.gaunt_identity_ratio(n, f)
            ratios[name] = r.ratio
        defined = [v for v in ratios.values() if v is not None]
        spread = max(defined) - min(defined) if defined else math.inf
        good = len(defined) >= 2 and spread <= 1e-9 * abs(np.mean(defined))
        ok &= good
        consts[n] = {"ratios": ratios, "C": float(np.mean(defined)) if defined else None, "spread": spread}
    detail = "C per n: " + ", ".join(f"{n}: {v['C']:.12g}" for n, v in consts.items())
    return ok, detail, consts


CRITERIA = [
    (1, "basis exactness", criterion_1),
    (2, "product tables", criterion_2),
    (3, "coefficient limits", criterion_3),
    (4, "leading slopes", criterion_4),
    (5, "contraction", criterion_5),
    (6, "steady residual", criterion_6),
    (7, "Gevrey bound", criterion_7),
    (8, "dynamics", criterion_8),
    (9, "travelling wave", criterion_9),
    (10, "rigidity", criterion_10),
    (11, "linearization kernel", criterion_11),
    (12, "Gaunt identity", criterion_12),
]


def _run(number, name, fn):
    t0 = time.perf_counter()
    try:
        ok, detail, metrics = fn()
    except Exception as exc:  # a crash is a failed criterion, reported as such
        ok, detail, metrics = False, f"error: {type(exc).__name__}: {exc}", {}
    return CriterionResult(number, name, bool(ok), detail, metrics, time.perf_counter() - t0)


def run_acceptance(only=None, stream=None):
    """Run the numbered criteria (all, or those in ``only``), printing one line each."""
    results = []
    for number, name, fn in CRITERIA:
        if only is not None and number not in only:
            continue
        res = _run(number, name, fn)
        results.append(res)
        if stream is not None:
            print(res.line(), file=stream, flush=True)
    return results


# ---------------------------------------------------------------- quick tier
def _quick_checks():
    rng = np.random.default_rng(3)
    N = 16
    n = degree_of(N)
    u = SpectralField(rng.standard_normal(harmonics.n_coeffs(N)) * np.exp(-0.2 * n), N)
    mf = u.copy()
    mf.coeffs[0] = 0.0
    grid = harmonics.product_grid(2 * N, N)
    z = SpectralField(np.where(order_of(N) == 0, u.coeffs, 0.0), N)
    zf = z.copy()
    zf.coeffs[0] = 0.0
    y22 = SpectralField.mode(2, 2)

    def raises(fn, exc):
        try:
            fn()
        except exc:
            return True
        return False

    yield "synthesize(0) = 0", lambda: float(np.max(np.abs(harmonics.synthesize(SpectralField.zeros(N), grid)))) == 0.0
    yield "Y_0^0 constant", lambda: np.allclose(
        harmonics.synthesize(SpectralField.mode(0, 0), grid), 1.0 / (2.0 * math.sqrt(PI)), rtol=0, atol=1e-15
    )
    yield "round trip", lambda: (harmonics.analyze(harmonics.synthesize(u, grid), grid, N) - u).l2() <= 1e-12
    g32 = harmonics.analyze(harmonics.synthesize(SpectralField.mode(3, 2, N), grid), grid, N)
    yield "Y_3^2 orthonormality", lambda: abs(g32[3, 2] - 1) <= 1e-13 and np.max(
        np.abs(np.delete(g32.coeffs, harmonics.index(3, 2)))
    ) <= 1e-13
    yield "invert_laplacian(laplacian(u)) = u", lambda: (harmonics.invert_laplacian(harmonics.laplacian(mf)) - mf).l2() <= 1e-13
    yield "laplacian(Y_0^0) = 0", lambda: harmonics.laplacian(SpectralField.mode(0, 0)).l2() == 0.0
    yield "Helmholtz kernel rejects Y_2^0", lambda: raises(
        lambda: harmonics.invert_shifted_helmholtz(SpectralField.mode(2, 0), 2), harmonics.KernelObstructionError
    )
    yield "d_phi(zonal) = 0", lambda: harmonics.d_phi(z).l2() == 0.0
    yield "J(psi, psi) = 0", lambda: harmonics.jacobian(u, u).l2() <= 1e-11
    yield "mean of J = 0", lambda: abs(harmonics.jacobian(u, mf).mean) <= 1e-11
    proj = harmonics.project_symmetry(SpectralField.from_modes({(3, 1): 1, (4, 2): 1}), harmonics.EVEN_COSINE)
    yield "symmetry projection", lambda: proj.modes() == {(4, 2): 1.0}
    yield "degree projection", lambda: harmonics.project_out_degree(
        SpectralField.from_modes({(2, 0): 1, (6, 2): 1}), 2
    ).modes() == {(6, 2): 1.0}
    yield "projection idempotent", lambda: np.array_equal(
        harmonics.project_symmetry(harmonics.project_symmetry(u, "even-cosine"), "even-cosine").coeffs,
        harmonics.project_symmetry(u, "even-cosine").coeffs,
    )
    yield "triple product with Y_0^0", lambda: abs(gaunt.triple_product((0, 0), (3, -2), (3, -2)) - 1 / (2 * math.sqrt(PI))) <= 1e-14
    yield "u Y_0^0 = u / (2 sqrt pi)", lambda: (
        gaunt.expand_product(u, SpectralField.mode(0, 0)).resize(N) - u / (2 * math.sqrt(PI))
    ).l2() <= 1e-13
    yield "||Y_2^2||_H2 = 7", lambda: abs(norms.sobolev_norm(y22) - 7.0) <= 1e-14
    yield "||Y_2^2||_Hdot2 = 6", lambda: abs(norms.homogeneous_sobolev_norm(y22) - 6.0) <= 1e-14
    yield "Gevrey norm of 0", lambda: norms.gevrey_norm(SpectralField.zeros(4)) == 0.0
    yield "algebra ratio rejects 0", lambda: raises(lambda: norms.algebra_defect(u, SpectralField.zeros(4)), ZeroDivisionError)
    yield "profile below H2 norm", lambda: norms.analyticity_profile(y22, 6.0, [0.1, 0.2]) == 0.0
    yield "c at origin", lambda: steady.c_gamma_beta(steady.RHParams(0.0, 0.0)) == 0.5
    yield "construction rejects beta = gamma = 0", lambda: raises(lambda: steady.RHParams(0.0, 0.0).check(), ValueError)
    yield "B = 0 when beta = 0", lambda: abs(
        steady.solve_AB(SpectralField.zeros(8, "even-cosine"), 0.0, steady.RHParams(0.0, 1.3))[1]
    ) <= 1e-15

    def no_degree_two():
        k0 = steady.apply_K(SpectralField.zeros(8, "even-cosine"), 0.02, steady.RHParams(1.0, 0.5))
        return float(np.max(np.abs(k0.coeffs[degree_of(8) == 2]))) == 0.0

    yield "K output has no degree 2", no_degree_two

    def y62_from_psi():
        r = steady.construct(steady.RHParams(1.0, 0.4), 0.01, nmax=12)
        Psi, _ = steady.assemble_solution(r)
        return Psi[6, 2] == 0.01 * r.psi[6, 2]

    yield "<Psi_eps, Y_6^2> = eps <psi, Y_6^2>", y62_from_psi
    yield "zonal tendency = 0", lambda: dynamics.tendency(zf, 0.7).l2() <= 1e-14
    yield "zonal state unchanged", lambda: np.array_equal(
        dynamics.evolve(zf, dynamics.EvolutionConfig(dt=1e-2, T=0.1, gamma=0.7, nmax=N))[0].coeffs, zf.coeffs
    )
    yield "rotation by 2 pi", lambda: (dynamics.rotate_frame(u, 2 * PI) - u).l2() <= 1e-13
    yield "rotation is an isometry", lambda: abs(norms.sobolev_norm(dynamics.rotate_frame(u, 0.37), 2) - norms.sobolev_norm(u, 2)) <= 1e-12 * norms.sobolev_norm(u, 2)
    yield "zonal travelling wave", lambda: dynamics.travelling_wave_check(steady.RHParams(0.0, 1.0), 0.0, T=0.2, nmax=8, dt=1e-2) <= 1e-15
    yield "L_rigid(zonal) = 0", lambda: rigidity.linearized_rigid(zf, rigidity.RigidityParams(1.0, 0.2, 0.3)).l2() == 0.0
    yield "L_RH(zonal) = 0", lambda: rigidity.linearized_RH(zf, steady.RHParams(1.0, 1.0)).l2() == 0.0


def run_quick(stream=None):
    """Exact-tier checks; all should pass in a few seconds."""
    results = []
    t0 = time.perf_counter()
    for i, (name, check) in enumerate(_quick_checks(), start=1):
        try:
            ok, detail = bool(check()), ""
        except Exception as exc:
            ok, detail = False, f"error: {type(exc).__name__}: {exc}"
        res = CriterionResult(f"q{i}", name, ok, detail, {}, time.perf_counter() - t0)
        t0 = time.perf_counter()
        results.append(res)
        if stream is not None:
            print(res.line(), file=stream, flush=True)
    return results
