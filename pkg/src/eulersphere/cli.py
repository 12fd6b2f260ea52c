"""Command-line interface: ``eulersphere <subcommand> [options]``.

Options can also come from a ``key = value`` file given with ``--config``;
keys are the long option names (with ``-`` or ``_``) and flags on the
command line override the file.  Results are wrapped in a JSON envelope
validated against ``envelope.schema.json``; tables are written as CSV.

Exit codes: 0 success, 1 usage, 2 computation failure, 3 acceptance failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from importlib import resources

import jsonschema
import numpy as np

from . import __version__, acceptance, dynamics, gaunt, harmonics, norms, rigidity, steady
from .harmonics import SpectralField

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_ACCEPTANCE = 0, 1, 2, 3
WORKERS_ENV = "EULERSPHERE_WORKERS"

COMPUTE_ERRORS = (
    steady.NoContractionError,
    steady.DegenerateSystemError,
    steady.CompatibilityError,
    dynamics.EvolutionBlowup,
    harmonics.ResolutionError,
    FloatingPointError,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _float_list(text):
    try:
        return [float(x) for x in text.replace(";", ",").split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from exc


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}") from exc


def build_parser():
    p = _Parser(prog="eulersphere", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"eulersphere {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", help="key = value file; command-line flags take precedence")
        sp.add_argument("--out", help="write the JSON envelope here (default: stdout)")
        sp.add_argument("--csv", help="write the main table here as CSV")
        sp.add_argument("-q", "--quiet", action="store_true")

    sp = sub.add_parser("construct", help="build one steady state")
    common(sp)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--nmax", type=int, default=24)
    sp.add_argument("--tol", type=float, default=1e-13)
    sp.add_argument("--max-iter", type=int, default=60)
    sp.add_argument("--field-out", help="write Psi_eps as a SpectralField JSON")

    sp = sub.add_parser("sweep", help="construct over a list of eps and extrapolate slopes")
    common(sp)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--eps-list", type=_float_list, required=True)
    sp.add_argument("--nmax", type=int, default=24)
    sp.add_argument("--tol", type=float, default=1e-13)
    sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("evolve", help="integrate the vorticity equation")
    common(sp)
    sp.add_argument(
        "--init",
        required=True,
        help="SpectralField JSON file of the initial vorticity, or construct:beta=B,gamma=G,eps=E",
    )
    sp.add_argument("--gamma", type=float, default=0.0)
    sp.add_argument("--dt", type=float, required=True)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--nmax", type=int, default=16)
    sp.add_argument("--sample-every", type=int, default=1)
    sp.add_argument("--state-out", help="write the final vorticity as SpectralField JSON")

    sp = sub.add_parser("rigidity", help="spectral condition and coercivity constants")
    common(sp)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--c", type=float, default=0.0)
    sp.add_argument("--gamma", type=float, default=0.0)
    sp.add_argument("--nmax", type=int, default=50)
    sp.add_argument("--exclude-degree1", action="store_true")

    sp = sub.add_parser("gaunt", help="triple products and product tables")
    common(sp)
    sp.add_argument("--triple", action="append", type=_int_list, default=[], help="n1,m1,n2,m2,n3,m3")
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--gamma", type=float, default=1.0)
    sp.add_argument("--identity-n", type=_int_list, default=[1, 2, 3, 4, 5])

    sp = sub.add_parser("norms", help="Sobolev and Gevrey norm table of a field")
    common(sp)
    sp.add_argument("--field", help="SpectralField JSON file")
    sp.add_argument("--construct", help="beta=B,gamma=G,eps=E[,nmax=N]: use the constructed psi_eps")
    sp.add_argument("--orders", type=_float_list, default=[0.0, 1.0, 2.0, 4.0])
    sp.add_argument("--lam-grid", type=_float_list, default=[0.0, 0.1, 0.2, 0.5, 1.0])
    sp.add_argument("--bound", type=float, help="also report the largest lambda on a fine grid below this bound")

    sp = sub.add_parser("verify", help="run the acceptance suite")
    common(sp)
    sp.add_argument("--quick", action="store_true", help="exact-tier checks only")
    sp.add_argument("--only", type=_int_list, help="criterion numbers to run")
    return p


# ---------------------------------------------------------------- config
def load_config(path):
    """``key = value`` lines; ``#`` starts a comment."""
    pairs = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            pairs[key.replace("_", "-")] = value
    return pairs


def _config_argv(subparser, pairs):
    known = {}
    for action in subparser._actions:
        for opt in action.option_strings:
            if opt.startswith("--"):
                known[opt[2:]] = action
    argv = []
    for key, value in pairs.items():
        if key in ("config", "help") or key not in known:
            raise UsageError(f"unknown config key {key!r} for {subparser.prog}")
        action = known[key]
        if action.nargs == 0:
            if value.lower() in ("1", "true", "yes", "on"):
                argv.append(f"--{key}")
            elif value.lower() not in ("0", "false", "no", "off"):
                raise UsageError(f"config key {key!r} expects a boolean")
        else:
            argv += [f"--{key}", value]
    return argv


def _find_config(argv):
    for i, tok in enumerate(argv):
        if tok == "--config":
            if i + 1 >= len(argv):
                raise UsageError("--config needs a path")
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def parse_args(argv):
    """Parse ``argv``; values from ``--config`` are inserted before the explicit flags."""
    parser = build_parser()
    path = _find_config(argv)
    if path is None or not argv or argv[0] not in COMMANDS:
        return parser.parse_args(argv)
    subparser = parser._subparsers._group_actions[0].choices[argv[0]]
    try:
        pairs = load_config(path)
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from exc
    return parser.parse_args([argv[0]] + _config_argv(subparser, pairs) + list(argv[1:]))


# ---------------------------------------------------------------- helpers
def _workers(requested):
    cap = os.environ.get(WORKERS_ENV)
    n = max(1, requested)
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError as exc:
            raise UsageError(f"{WORKERS_ENV} must be an integer") from exc
    return n


def _kv(text):
    out = {}
    for part in text.split(","):
        if not part.strip():
            continue
        if "=" not in part:
            raise UsageError(f"expected key=value in {text!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = float(v)
    return out


def _construct_spec(text):
    spec = _kv(text)
    missing = {"beta", "gamma", "eps"} - set(spec)
    if missing:
        raise UsageError(f"construct spec needs {sorted(missing)}")
    return spec


def _read_field(path):
    try:
        with open(path) as fh:
            return SpectralField.from_json(fh.read())
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read field {path!r}: {exc}") from exc


def _write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    text = buf.getvalue()
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def _check_params(beta, gamma):
    if not (math.isfinite(beta) and math.isfinite(gamma)):
        raise UsageError("beta and gamma must be finite")
    if beta * beta + gamma * gamma <= 0:
        raise UsageError("precondition violated: beta^2 + gamma^2 > 0")


def _check_eps(eps):
    if not (eps >= 0 and math.isfinite(eps)):
        raise UsageError("precondition violated: eps >= 0")


# ---------------------------------------------------------------- subcommands
def cmd_construct(args):
    _check_params(args.beta, args.gamma)
    _check_eps(args.eps)
    if args.nmax < 6:
        raise UsageError("precondition violated: nmax >= 6")
    p = steady.RHParams(args.beta, args.gamma)
    r = steady.construct(p, args.eps, nmax=args.nmax, tol=args.tol, max_iter=args.max_iter)
    payload = r.to_dict()
    tables = []
    if args.field_out:
        Psi, _ = steady.assemble_solution(r)
        with open(args.field_out, "w") as fh:
            fh.write(Psi.to_json())
        tables.append(args.field_out)
    if args.csv:
        _write_csv(args.csv, ["n", "m", "coefficient"], gaunt.product_table(r.psi, 0.0))
        tables.append(args.csv)
    return payload, tables, None


def cmd_sweep(args):
    _check_params(args.beta, args.gamma)
    for e in args.eps_list:
        _check_eps(e)
    if not args.eps_list:
        raise UsageError("empty eps list")
    p = steady.RHParams(args.beta, args.gamma)
    res = steady.epsilon_sweep(p, args.eps_list, nmax=args.nmax, tol=args.tol, workers=_workers(args.workers))
    rows = [[r[c] for c in steady.SWEEP_COLUMNS] for r in res.rows]
    text = _write_csv(args.csv, steady.SWEEP_COLUMNS, rows)
    tables = [args.csv] if args.csv else []
    payload = res.to_dict()
    payload["leading_coefficients"] = {
        f"Y{n}{m}": v for (n, m), v in steady.leading_coefficients(p).items()
    }
    return payload, tables, None if args.csv else text


def cmd_evolve(args):
    if args.init.startswith("construct:"):
        spec = _construct_spec(args.init[len("construct:"):])
        _check_params(spec["beta"], spec["gamma"])
        p = steady.RHParams(spec["beta"], spec["gamma"])
        nmax = int(spec.get("nmax", args.nmax))
        Psi, _ = steady.assemble_solution(steady.construct(p, spec["eps"], nmax=nmax))
        omega0 = harmonics.laplacian(Psi)
    else:
        omega0 = _read_field(args.init)
    if abs(omega0.coeffs[0]) > 1e-12 * max(1.0, float(np.max(np.abs(omega0.coeffs)))):
        raise UsageError("precondition violated: initial vorticity must be mean free")
    try:
        cfg = dynamics.EvolutionConfig(
            dt=args.dt, T=args.T, gamma=args.gamma, nmax=args.nmax, sample_every=args.sample_every
        )
        omega_T, diag = dynamics.evolve(omega0, cfg)
    except (ValueError, dynamics.StabilityError) as exc:
        if isinstance(exc, COMPUTE_ERRORS):
            raise
        raise UsageError(f"precondition violated: {exc}") from exc
    tables = []
    header = ["time", "energy", "enstrophy", "mean", "drift"]
    text = _write_csv(args.csv, header, diag.rows())
    if args.csv:
        tables.append(args.csv)
    if args.state_out:
        with open(args.state_out, "w") as fh:
            fh.write(omega_T.to_json())
        tables.append(args.state_out)
    payload = {
        "steps": cfg.n_steps,
        "energy_relative_change": diag.relative_change("energy"),
        "enstrophy_relative_change": diag.relative_change("enstrophy"),
        "final_drift": diag.drift[-1],
        "final_mean": diag.mean[-1],
    }
    return payload, tables, None if args.csv else text


def cmd_rigidity(args):
    if args.alpha == 0:
        raise UsageError("precondition violated: alpha != 0")
    if args.nmax < 1:
        raise UsageError("precondition violated: nmax >= 1")
    p = rigidity.RigidityParams(args.alpha, args.c, args.gamma)
    report = rigidity.rigidity_report(p, args.nmax)
    if args.exclude_degree1:
        report["C1_selected"] = report["C1_excluding_degree1"]
    else:
        report["C1_selected"] = report["C1"]
    scan = rigidity.spectral_condition_gap(p, args.nmax)
    text = _write_csv(args.csv, ["n", "gap", "violation"], scan.rows())
    return _finite(report), [args.csv] if args.csv else [], None if args.csv else text


def cmd_gaunt(args):
    rows = []
    for t in args.triple:
        if len(t) != 6:
            raise UsageError("--triple needs six integers n1,m1,n2,m2,n3,m3")
        try:
            val = gaunt.triple_product(t[0:2], t[2:4], t[4:6])
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        rows.append(["triple", f"({t[0]},{t[1]})({t[2]},{t[3]})({t[4]},{t[5]})", "", val])
    first, second = gaunt.rh_product_tables(args.beta, args.gamma)
    for name, table in (("Psi*Y22", first), ("Psi^2*Y22", second)):
        for n, m, c in gaunt.product_table(table, 1e-15):
            rows.append([name, n, m, c])
    identity = {}
    for n in args.identity_n:
        if n < 1:
            raise UsageError("identity degree must be >= 1")
        ratios = {k: gaunt.gaunt_identity_ratio(n, f).ratio for k, f in acceptance.GAUNT_FAMILY.items()}
        identity[str(n)] = ratios
    text = _write_csv(args.csv, ["table", "n", "m", "coefficient"], rows)
    payload = {"rows": [[str(r[0]), r[1], r[2], r[3]] for r in rows], "identity_ratios": identity}
    return payload, [args.csv] if args.csv else [], None if args.csv else text


def cmd_norms(args):
    if (args.field is None) == (args.construct is None):
        raise UsageError("give exactly one of --field or --construct")
    if args.field:
        u = _read_field(args.field)
    else:
        spec = _construct_spec(args.construct)
        _check_params(spec["beta"], spec["gamma"])
        u = steady.construct(steady.RHParams(spec["beta"], spec["gamma"]), spec["eps"], nmax=int(spec.get("nmax", 24))).psi
    if any(lam < 0 for lam in args.lam_grid) or any(k < 0 for k in args.orders):
        raise UsageError("precondition violated: lambda >= 0 and k >= 0")
    rows = norms.norm_table(u, args.orders, args.lam_grid)
    payload = {"rows": [[k, p, v] for k, p, v in rows]}
    if args.bound is not None:
        payload["lambda_max"] = norms.analyticity_profile(u, args.bound, acceptance.LAM_GRID)
    text = _write_csv(args.csv, ["kind", "parameter", "value"], rows)
    return _finite(payload), [args.csv] if args.csv else [], None if args.csv else text


def cmd_verify(args):
    stream = None if args.quiet else sys.stdout
    if args.quick:
        results = acceptance.run_quick(stream)
    else:
        results = acceptance.run_acceptance(only=set(args.only) if args.only else None, stream=stream)
    passed = sum(r.passed for r in results)
    payload = {
        "quick": bool(args.quick),
        "passed": passed,
        "total": len(results),
        "results": [r.to_dict() for r in results],
    }
    status = "ok" if passed == len(results) else "acceptance-failure"
    if args.csv:
        _write_csv(args.csv, ["criterion", "name", "passed", "detail"], [[r.number, r.name, r.passed, r.detail] for r in results])
    return payload, [args.csv] if args.csv else [], status


COMMANDS = {
    "construct": cmd_construct,
    "sweep": cmd_sweep,
    "evolve": cmd_evolve,
    "rigidity": cmd_rigidity,
    "gaunt": cmd_gaunt,
    "norms": cmd_norms,
    "verify": cmd_verify,
}


def _finite(x):
    if isinstance(x, dict):
        return {k: _finite(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_finite(v) for v in x]
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def _config_echo(args):
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("quiet",)}


def schema():
    return json.loads(resources.files("eulersphere").joinpath("envelope.schema.json").read_text())


def make_envelope(subcommand, config, status, seconds, payload, tables, error=None):
    env = {
        "tool": "eulersphere",
        "version": __version__,
        "subcommand": subcommand,
        "config": config,
        "status": status,
        "wall_clock_s": seconds,
        "payload": payload,
        "tables": list(tables),
    }
    if error is not None:
        env["error"] = error
    jsonschema.validate(env, schema())
    return env


def run(argv=None):
    """Parse, dispatch and persist; returns the exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    t0 = time.perf_counter()
    status, code, payload, tables, error, text = "ok", EXIT_OK, None, [], None, None
    try:
        payload, tables, extra = COMMANDS[args.subcommand](args)
        if args.subcommand == "verify":
            status = extra
            code = EXIT_OK if status == "ok" else EXIT_ACCEPTANCE
        else:
            text = extra
    except COMPUTE_ERRORS as exc:
        status, code = "error", EXIT_COMPUTE
        error = {"type": type(exc).__name__, "message": str(exc)}
        print(f"computation failed: {exc}", file=sys.stderr)
    except (UsageError, OSError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    env = make_envelope(args.subcommand, _config_echo(args), status, time.perf_counter() - t0, payload, tables, error)
    blob = json.dumps(env, indent=2, sort_keys=True)
    # stdout carries the CSV table when there is one, otherwise the envelope
    if text and not args.quiet:
        sys.stdout.write(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(blob + "\n")
    elif not text and args.subcommand != "verify":
        print(blob)
    return code


def main():
    sys.exit(run())
