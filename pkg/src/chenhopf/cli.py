"""Command-line surface.

Subcommands expose the analysis pipeline end to end: hypothesis checks,
origin spectra, averaged-function evaluation, zero location, orbit
verification, epsilon sweeps, orbit sampling, and a cross-oracle selftest.

Exit codes: 0 success, 1 hypothesis violation, 2 numerical failure,
3 input/IO error. JSON is the machine interface; the default human-readable
output is a formatting layer over the same data and never contains numbers
absent from the JSON. Every JSON document embeds a run manifest echoing the
parameters, so reruns reproduce all numeric fields byte for byte (the
timestamp lives only inside the manifest).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .averaging import (
    averaged_spectrum,
    averaged_zeros,
    bifurcation_function,
    bifurcation_function_quadrature,
    jacobian_determinant,
    refine_zero,
    stability_verdict,
)
from .chen import (
    ChenParams,
    RegimeConfig,
    RegimeError,
    check_zero_hopf_conditions,
    origin_char_poly,
    origin_eigenvalues,
    jacobian_full,
    random_admissible_config,
)
from .integrators import IntegrationError
from .linear_flow import fundamental_matrix, fundamental_matrix_inverse
from .numerics import (
    EigenSolveError,
    SingularMatrixError,
    eig4,
    finite_difference_jacobian,
    determinant,
)
from .orbits import (
    ShootingError,
    continuation_sweep,
    find_bifurcating_orbits,
    orbit_trajectory,
    recurrence_defect,
    unscale_orbit,
)

EXIT_OK = 0
EXIT_HYPOTHESIS = 1
EXIT_NUMERICAL = 2
EXIT_INPUT = 3


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems with exit code 3."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _add_param_flags(p: _Parser, with_epsilon: bool = False) -> None:
    p.add_argument("--a", type=float, default=-1.0)
    p.add_argument("--b", type=float, default=-1.0)
    p.add_argument("--c", type=float, default=None,
                   help="defaults to the value of --a")
    p.add_argument("--d", type=float, default=2.0)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    if with_epsilon:
        p.add_argument("--epsilon", type=float, default=0.01)


def _params(args) -> ChenParams:
    c = args.a if args.c is None else args.c
    return ChenParams(a=args.a, b=args.b, c=c, d=args.d, r=args.r)


def _config(args, epsilon: float | None = None) -> RegimeConfig:
    p = _params(args)
    if p.c != p.a:
        raise RegimeError(f"this command requires c == a, got c={p.c}, a={p.a}")
    eps = getattr(args, "epsilon", 0.0) if epsilon is None else epsilon
    return RegimeConfig(p, eps)


def _cnum(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def _manifest(args, command: str) -> dict:
    echo = {}
    for key in ("a", "b", "c", "d", "r", "epsilon", "epsilons", "tol", "nodes",
                "seed", "method", "point", "branch", "samples", "frame", "out"):
        if hasattr(args, key):
            echo[key] = getattr(args, key)
    return {
        "command": command,
        "parameters": echo,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def _emit(args, payload: dict, human: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(human)


# ---------------------------------------------------------------- commands

def _cmd_check(args) -> int:
    report = check_zero_hopf_conditions(_params(args))
    payload = {
        "manifest": _manifest(args, "check"),
        "report": {
            "c_equals_a": report.c_equals_a,
            "a_times_a_plus_d": report.a_times_a_plus_d,
            "a_condition_holds": report.a_condition_holds,
            "b_times_a_plus_d_times_r": report.b_times_a_plus_d_times_r,
            "b_condition_holds": report.b_condition_holds,
            "d_nonzero": report.d_nonzero,
            "overall": report.overall,
        },
    }
    lines = [
        f"c == a                : {report.c_equals_a}",
        f"a*(a+d) = {report.a_times_a_plus_d:< .6g} < 0 : {report.a_condition_holds}",
        f"b*(a+d)*r = {report.b_times_a_plus_d_times_r:< .6g} < 0 : {report.b_condition_holds}",
        f"d != 0                : {report.d_nonzero}",
        f"overall               : {report.overall}",
    ]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if report.overall else EXIT_HYPOTHESIS


def _cmd_spectrum(args) -> int:
    params = _params(args)
    closed = origin_eigenvalues(params)
    numeric = eig4(jacobian_full(params, np.zeros(4)))
    deviation = closed.match_distance(numeric)
    poly = origin_char_poly(params)
    payload = {
        "manifest": _manifest(args, "spectrum"),
        "closed_form": {
            "lambda1": _cnum(complex(params.r)),
            "lambda2": _cnum(complex(-params.b)),
            "lambda3": _cnum(closed.values[0]),
            "lambda4": _cnum(closed.values[-1]),
            "ordered": [_cnum(v) for v in closed.values],
        },
        "numeric": [_cnum(v) for v in numeric.values],
        "max_deviation": deviation,
        "char_poly_descending": [float(c) for c in poly],
    }
    lines = ["origin spectrum (closed form | numeric):"]
    for cv, nv in zip(closed.values, numeric.values):
        lines.append(f"  {cv:>24.12g}   |   {nv:>24.12g}")
    lines.append(f"max deviation: {deviation:.3e}")
    lines.append("char poly (descending): " + ", ".join(f"{c:.12g}" for c in poly))
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _parse_point(text: str) -> np.ndarray:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise ValueError(f"cannot parse point {text!r}: {exc}") from exc
    if len(vals) != 4:
        raise ValueError(f"point needs 4 comma-separated reals, got {len(vals)}")
    return np.array(vals)


def _cmd_favg(args) -> int:
    config = _config(args, epsilon=0.0)
    u = _parse_point(args.point)
    result: dict = {"manifest": _manifest(args, "favg")}
    lines = []
    closed = quad = None
    if args.method in ("closed", "both"):
        closed = bifurcation_function(config, u)
        result["closed"] = {f"f{i+1}": float(v) for i, v in enumerate(closed)}
        lines.append("closed    : " + np.array2string(closed, precision=15))
    if args.method in ("quadrature", "both"):
        quad = bifurcation_function_quadrature(config, u, nodes=args.nodes)
        result["quadrature"] = {f"f{i+1}": float(v) for i, v in enumerate(quad)}
        lines.append("quadrature: " + np.array2string(quad, precision=15))
    if args.method == "both":
        disc = float(np.max(np.abs(closed - quad)))
        result["discrepancy"] = disc
        lines.append(f"discrepancy: {disc:.3e}")
    _emit(args, result, "\n".join(lines))
    return EXIT_OK


def _zero_payload(zero) -> dict:
    return {
        "point": [float(v) for v in zero.point],
        "residual": zero.residual,
        "det_jacobian": zero.det_jacobian,
        "spectrum": [_cnum(v) for v in zero.spectrum.values],
        "simple": zero.simple,
        "all_negative_real_parts": zero.all_negative_real_parts,
    }


def _cmd_zeros(args) -> int:
    config = _config(args, epsilon=0.0)
    first, second = averaged_zeros(config)
    verdict = stability_verdict(config)
    rng = np.random.default_rng(args.seed)
    refined = []
    for zero in (first, second):
        direction = rng.standard_normal(4)
        direction /= np.linalg.norm(direction)
        seed = zero.point + 0.1 * np.linalg.norm(zero.point) * direction
        refined_zero, report = refine_zero(config, seed, tol=args.tol)
        refined.append((refined_zero, report))
    payload = {
        "manifest": _manifest(args, "zeros"),
        "closed_form": [_zero_payload(first), _zero_payload(second)],
        "newton_refined": [
            {**_zero_payload(z), "iterations": rep.iterations, "converged": rep.converged}
            for z, rep in refined
        ],
        "det_closed_form": jacobian_determinant(config),
        "spectrum_closed_form": [_cnum(v) for v in averaged_spectrum(config).values],
        "verdict": {"theorem_applicable": verdict.theorem_applicable, "note": verdict.note},
    }
    lines = []
    for tag, zero in (("first", first), ("second", second)):
        lines.append(f"{tag} zero : {np.array2string(zero.point, precision=12)} "
                     f"(residual {zero.residual:.2e}, simple={zero.simple})")
    lines.append(f"det Df     : {jacobian_determinant(config):.12g}")
    lines.append("spectrum   : " + ", ".join(f"{v:.6g}" for v in averaged_spectrum(config).values))
    lines.append(f"stability  : applicable={verdict.theorem_applicable} ({verdict.note})")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _orbit_payload(config, orbit) -> dict:
    return {
        "branch": orbit.branch,
        "epsilon": orbit.epsilon,
        "frame": orbit.frame,
        "initial_state": [float(v) for v in orbit.initial_state],
        "period": orbit.period,
        "residual": orbit.residual,
        "multipliers": [_cnum(v) for v in orbit.multipliers.values],
        "recurrence_defect": recurrence_defect(config, orbit),
    }


def _cmd_verify(args) -> int:
    config = _config(args)
    first, second = find_bifurcating_orbits(config)
    payload = {
        "manifest": _manifest(args, "verify"),
        "scaled": [_orbit_payload(config, first), _orbit_payload(config, second)],
    }
    if config.epsilon > 0:
        payload["original"] = [
            _orbit_payload(config, unscale_orbit(first)),
            _orbit_payload(config, unscale_orbit(second)),
        ]
    lines = []
    for orbit in (first, second):
        lines.append(
            f"branch {orbit.branch}: u* = {np.array2string(orbit.initial_state, precision=10)} "
            f"T* = {orbit.period:.10g} residual = {orbit.residual:.2e}"
        )
        lines.append("  multipliers: " + ", ".join(f"{v:.8g}" for v in orbit.multipliers.values))
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _parse_epsilons(text: str) -> list[float]:
    try:
        eps = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise ValueError(f"cannot parse epsilons {text!r}: {exc}") from exc
    if not eps:
        raise ValueError("need at least one epsilon")
    return eps


_SWEEP_COLUMNS = ["epsilon", "branch", "distance_to_p", "period_error",
                  "residual", "max_multiplier_modulus", "converged"]


def _sweep_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([
            repr(row.epsilon),
            row.branch,
            "" if row.distance_to_p is None else repr(row.distance_to_p),
            "" if row.period_error is None else repr(row.period_error),
            "" if row.residual is None else repr(row.residual),
            "" if row.max_multiplier_modulus is None else repr(row.max_multiplier_modulus),
            "true" if row.converged else "false",
        ])
    return buf.getvalue()


def _cmd_sweep(args) -> int:
    config = _config(args, epsilon=0.0)
    result = continuation_sweep(config, _parse_epsilons(args.epsilons))
    text = _sweep_csv(result.rows)
    summary = {
        "manifest": _manifest(args, "sweep"),
        "slope_by_branch": {str(k): v for k, v in result.slope_by_branch.items()},
        "converged_rows": sum(1 for row in result.rows if row.converged),
        "total_rows": len(result.rows),
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        _emit(args, summary,
              f"wrote {len(result.rows)} rows to {args.out}; "
              f"slopes: {summary['slope_by_branch']}")
    else:
        sys.stdout.write(text)
        print(json.dumps(summary, indent=2) if args.json else
              f"slopes: {summary['slope_by_branch']}", file=sys.stderr)
    return EXIT_OK


def _cmd_orbit(args) -> int:
    config = _config(args)
    first, second = find_bifurcating_orbits(config)
    orbit = first if args.branch == 1 else second
    if args.frame == "original":
        orbit = unscale_orbit(orbit)
    traj = orbit_trajectory(config, orbit, samples=args.samples)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "x", "y", "z", "w"])
    for t, state in zip(traj.times, traj.states):
        writer.writerow([repr(float(t))] + [repr(float(v)) for v in state])
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
        print(f"wrote {args.samples} samples to {args.out}")
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def _selftest_checks(args):
    rng = np.random.default_rng(args.seed)
    configs = [("canonical", RegimeConfig(ChenParams(-1.0, -1.0, -1.0, 2.0, 1.0), 0.0))]
    configs += [(f"random{i}", random_admissible_config(rng)) for i in range(5)]
    checks = []

    worst = 0.0
    for _, cfg in configs:
        for _ in range(25):
            u = rng.uniform(-2, 2, 4)
            diff = float(np.max(np.abs(
                bifurcation_function(cfg, u)
                - bifurcation_function_quadrature(cfg, u)
            )))
            worst = max(worst, diff / (1 + float(np.max(np.abs(u))) ** 2))
    checks.append(("averaged function: closed vs quadrature", worst, 1e-10))

    worst = 0.0
    for _, cfg in configs:
        for _ in range(5):
            t = rng.uniform(0, 10)
            prod = fundamental_matrix(cfg, t) @ fundamental_matrix_inverse(cfg, t)
            worst = max(worst, float(np.max(np.abs(prod - np.eye(4)))))
    checks.append(("fundamental matrix times inverse vs identity", worst, 1e-9))

    worst = 0.0
    for _, cfg in configs:
        closed = origin_eigenvalues(cfg.params)
        numeric = eig4(jacobian_full(cfg.params, np.zeros(4)))
        worst = max(worst, closed.match_distance(numeric))
    checks.append(("origin spectrum: closed vs numeric", worst, 1e-8))

    worst_det, worst_spec = 0.0, 0.0
    for _, cfg in configs:
        det_closed = jacobian_determinant(cfg)
        spec_closed = averaged_spectrum(cfg)
        for zero in averaged_zeros(cfg):
            jac = finite_difference_jacobian(
                lambda v: bifurcation_function(cfg, v), zero.point, step=1e-3)
            worst_det = max(worst_det, abs(float(determinant(jac)) - det_closed) / abs(det_closed))
            worst_spec = max(worst_spec, spec_closed.match_distance(eig4(jac)))
    checks.append(("averaged det: closed vs finite differences", worst_det, 1e-5))
    checks.append(("averaged spectrum: closed vs finite differences", worst_spec, 1e-5))

    if args.force_fail:
        checks.append(("forced failure (harness check)", 1.0, 0.0))
    return checks


def _cmd_selftest(args) -> int:
    checks = _selftest_checks(args)
    rows = []
    ok_all = True
    for name, value, bound in checks:
        ok = value <= bound
        ok_all = ok_all and ok
        rows.append((name, value, bound, ok))
    payload = {
        "manifest": _manifest(args, "selftest"),
        "checks": [
            {"name": n, "value": float(v), "bound": float(b), "pass": bool(ok)}
            for n, v, b, ok in rows
        ],
        "pass": bool(ok_all),
    }
    width = max(len(n) for n, *_ in rows)
    lines = [
        f"{n:<{width}}  {v:9.3e} <= {b:8.1e}  {'PASS' if ok else 'FAIL'}"
        for n, v, b, ok in rows
    ]
    lines.append("overall: " + ("PASS" if ok_all else "FAIL"))
    _emit(args, payload, "\n".join(lines))
    if not ok_all:
        failing = next(n for n, *_, ok in rows if not ok)
        print(f"selftest failed: {failing}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="chenhopf", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[], help="zero-Hopf hypothesis report")
    _add_param_flags(p)

    p = sub.add_parser("spectrum", help="origin eigenvalues, dual path")
    _add_param_flags(p)

    p = sub.add_parser("favg", help="evaluate the averaged (bifurcation) function")
    _add_param_flags(p)
    p.add_argument("--point", required=True, help="x0,y0,z0,w0")
    p.add_argument("--method", choices=["closed", "quadrature", "both"], default="both")
    p.add_argument("--nodes", type=int, default=64)

    p = sub.add_parser("zeros", help="averaged zeros, Jacobian data, stability verdict")
    _add_param_flags(p)
    p.add_argument("--tol", type=float, default=1e-13)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("verify", help="shoot both bifurcating orbits at one epsilon")
    _add_param_flags(p, with_epsilon=True)

    p = sub.add_parser("sweep", help="epsilon continuation sweep, CSV output")
    _add_param_flags(p)
    p.add_argument("--epsilons", required=True, help="comma-separated ascending list")
    p.add_argument("--out", default=None, help="CSV output path (default stdout)")

    p = sub.add_parser("orbit", help="sample one orbit over a period as CSV")
    _add_param_flags(p, with_epsilon=True)
    p.add_argument("--branch", type=int, choices=[1, 2], default=1)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--frame", choices=["scaled", "original"], default="scaled")
    p.add_argument("--out", default=None, help="CSV output path (default stdout)")

    p = sub.add_parser("selftest", help="cross-oracle consistency suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.add_argument("--force-fail", action="store_true", help=argparse.SUPPRESS)

    return parser


_DISPATCH = {
    "check": _cmd_check,
    "spectrum": _cmd_spectrum,
    "favg": _cmd_favg,
    "zeros": _cmd_zeros,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
    "orbit": _cmd_orbit,
    "selftest": _cmd_selftest,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _DISPATCH[args.command](args)
    except RegimeError as exc:
        print(f"hypothesis violation: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (ShootingError, IntegrationError, EigenSolveError, SingularMatrixError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
