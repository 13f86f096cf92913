"""Command-line interface.

Subcommands: ``period`` (extended period scan to CSV), ``simulate``
(trajectory + collision log), ``successor`` (section-map grid export),
``find`` (periodic-orbit search) and ``verify`` (machine-readable property
suites).  Options may come from a JSON config document (``--config``); flags
given on the command line win over config values.

Exit codes: 0 success, 2 usage, 3 guard/domain violation, 4 nothing found,
5 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from contextlib import contextmanager

import numpy as np

from . import export
from .errors import (
    BoundsError,
    DomainError,
    GuardError,
    NoCollisionError,
    NumericalError,
    QuadratureError,
    RegimeError,
)
from .finder import FinderOptions, find_orbits, verify_orbit
from .forcing import Forcing
from .integrator import continue_bouncing, cross_collision, default_delta, integrate_classical, sandwich_check, singular_part
from .period import monotonicity_scan, period_closed_form_half, period_extended
from .potential import (
    PowerLawPotential,
    eval_derivatives,
    gamma_threshold,
    schaaf_expression,
    schaaf_expression_closed_form,
    turning_points,
)
from .successor import SCAN_TOL, SectionPoint, gamma_ladder, jacobian, successor, successor_iterate

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_GUARD = 3
EXIT_NOT_FOUND = 4
EXIT_NUMERICAL = 5


def _merge(args: argparse.Namespace, config: dict, key: str, default=None):
    val = getattr(args, key.replace("-", "_"), None)
    if val is not None:
        return val
    if key in config:
        return config[key]
    return default


def _load_config(args) -> dict:
    if getattr(args, "config", None):
        with open(args.config) as fh:
            return json.load(fh)
    return {}


def _resolve_forcing(args, config) -> Forcing:
    if getattr(args, "forcing", None):
        with open(args.forcing) as fh:
            return Forcing.from_dict(json.load(fh))
    p0 = _merge(args, config, "p0")
    if p0 is not None:
        return Forcing.constant(float(p0))
    if "forcing" in config:
        return Forcing.from_dict(config["forcing"])
    raise DomainError("no forcing given: pass --p0 or --forcing file.json")


@contextmanager
def _out_stream(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--alpha", type=float, help="singularity exponent in (0,1)")
    p.add_argument("--p0", type=float, help="constant forcing level (negative)")
    p.add_argument("--forcing", help="JSON file {c0, harmonics:[{k,a,b}]}")
    p.add_argument("--config", help="JSON config document; flags override it")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--tol", type=float, help="quadrature tolerance (period command)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bouncesim", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("period", help="extended period function scan")
    _add_common(p)
    p.add_argument("--h-min", type=float)
    p.add_argument("--h-max", type=float)
    p.add_argument("--steps", type=int)

    p = sub.add_parser("simulate", help="bouncing trajectory and collision log")
    _add_common(p)
    p.add_argument("--t0", type=float)
    p.add_argument("--v0", type=float)
    p.add_argument("--u0", type=float, help="classical initial position (launch from u=0 if omitted)")
    p.add_argument("--t-end", type=float)
    p.add_argument("--delta", type=float)

    p = sub.add_parser("successor", help="successor map grid export")
    _add_common(p)
    p.add_argument("--t0-steps", type=int)
    p.add_argument("--v-min", type=float)
    p.add_argument("--v-max", type=float)
    p.add_argument("--v-steps", type=int)
    p.add_argument("--n", type=int, help="iterate order")
    p.add_argument("--m", type=int, help="period multiple in the discrepancy")
    p.add_argument("--with-det", action="store_true", help="also compute det J(t,E) per point (slow)")

    p = sub.add_parser("find", help="periodic bouncing orbit search")
    _add_common(p)
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--v-min", type=float)
    p.add_argument("--v-max", type=float)
    p.add_argument("--grid-t0", type=int)
    p.add_argument("--grid-v", type=int)

    p = sub.add_parser("verify", help="run the invariant suites")
    _add_common(p)
    p.add_argument("--suite", action="append", help="restrict to named suite(s)")
    p.add_argument("--seed", type=int, default=20260810)
    return ap


def cmd_period(args) -> int:
    config = _load_config(args)
    alpha = float(_merge(args, config, "alpha", 0.5))
    p0 = _merge(args, config, "p0")
    if p0 is None:
        print("period requires a constant forcing (--p0)", file=sys.stderr)
        return EXIT_USAGE
    h_min = _merge(args, config, "h-min")
    h_max = _merge(args, config, "h-max")
    steps = int(_merge(args, config, "steps", 100))
    if h_min is None or h_max is None or not float(h_min) < float(h_max) or steps < 2:
        print("period requires --h-min < --h-max and --steps >= 2", file=sys.stderr)
        return EXIT_USAGE
    tol = float(_merge(args, config, "tol", 1e-10))
    P = PowerLawPotential(alpha=alpha, p0=float(p0))
    hs = np.linspace(float(h_min), float(h_max), steps)
    samples = [period_extended(P, float(h), tol=tol) for h in hs]
    fmt = _merge(args, config, "format", "csv")
    with _out_stream(args.out) as fh:
        if fmt == "json":
            json.dump(
                [
                    {"h": s.h, "T": s.T, "regime": s.regime.value, "err": s.quadrature_error_estimate}
                    for s in samples
                ],
                fh,
                indent=1,
            )
            fh.write("\n")
        else:
            export.write_period_csv(samples, fh)
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = _load_config(args)
    alpha = float(_merge(args, config, "alpha", 0.5))
    F = _resolve_forcing(args, config)
    t0 = float(_merge(args, config, "t0", 0.0))
    v0 = _merge(args, config, "v0")
    t_end = _merge(args, config, "t-end")
    if v0 is None or t_end is None:
        print("simulate requires --v0 and --t-end", file=sys.stderr)
        return EXIT_USAGE
    u0 = _merge(args, config, "u0")
    delta = _merge(args, config, "delta")
    try:
        traj = continue_bouncing(
            alpha, F, t0, float(v0), float(t_end),
            delta=None if delta is None else float(delta),
            u0=None if u0 is None else float(u0),
        )
    except GuardError as exc:
        _, gamma = gamma_threshold(alpha, F.p1, F.p2)
        print(f"guard violation: {exc} (gamma = {gamma})", file=sys.stderr)
        return EXIT_GUARD
    fmt = _merge(args, config, "format", "csv")
    if args.out is None or args.out == "-":
        if fmt == "json":
            export.write_trajectory_json(traj, sys.stdout)
        else:
            export.write_trajectory_csv(traj, sys.stdout)
        export.write_collisions_jsonl(traj, sys.stderr)
    else:
        base = args.out
        traj_path = base + (".trajectory.json" if fmt == "json" else ".trajectory.csv")
        with open(traj_path, "w") as fh:
            if fmt == "json":
                export.write_trajectory_json(traj, fh)
            else:
                export.write_trajectory_csv(traj, fh)
        with open(base + ".collisions.jsonl", "w") as fh:
            export.write_collisions_jsonl(traj, fh)
    return EXIT_OK


def cmd_successor(args) -> int:
    config = _load_config(args)
    alpha = float(_merge(args, config, "alpha", 0.5))
    F = _resolve_forcing(args, config)
    n = int(_merge(args, config, "n", 1))
    m = int(_merge(args, config, "m", 1))
    t0_steps = int(_merge(args, config, "t0-steps", 16))
    v_steps = int(_merge(args, config, "v-steps", 16))
    _, gamma = gamma_threshold(alpha, F.p1, F.p2)
    ladder = gamma_ladder(alpha, F.p1, F.p2, n)
    v_min = float(_merge(args, config, "v-min", ladder.top * 1.01 if ladder.top > 0 else 0.5))
    v_max = float(_merge(args, config, "v-max", max(4.0 * v_min, 4.0)))
    if v_min <= ladder.top:
        print(f"v-min {v_min} below the n-impact threshold gamma_n = {ladder.top}", file=sys.stderr)
        return EXIT_GUARD
    rows = []
    shift = 2.0 * math.pi * m
    for t0 in np.linspace(0.0, 2.0 * math.pi, t0_steps, endpoint=False):
        for v0 in np.geomspace(v_min, v_max, v_steps):
            pt = SectionPoint(float(t0), float(v0))
            try:
                end, _ = successor_iterate(alpha, F, pt, n, tol=SCAN_TOL)
            except (GuardError, NoCollisionError) as exc:
                print(f"skipping undefined cell {pt}: {exc}", file=sys.stderr)
                continue
            det = math.nan
            if args.with_det:
                det = jacobian(alpha, F, pt, n=n).det_tE
            rows.append((pt.t, pt.v, end.t, end.v, end.t - pt.t - shift, det))
    with _out_stream(args.out) as fh:
        export.write_successor_grid_csv(rows, fh)
    return EXIT_OK


def cmd_find(args) -> int:
    config = _load_config(args)
    alpha = float(_merge(args, config, "alpha", 0.5))
    F = _resolve_forcing(args, config)
    m = _merge(args, config, "m")
    n = _merge(args, config, "n")
    if m is None or n is None or int(m) < 1 or int(n) < 1:
        print("find requires --m >= 1 and --n >= 1", file=sys.stderr)
        return EXIT_USAGE
    m, n = int(m), int(n)
    v_min = _merge(args, config, "v-min")
    v_max = _merge(args, config, "v-max")
    box = None
    if v_min is not None and v_max is not None:
        box = (float(v_min), float(v_max))
    opts = FinderOptions(
        grid_t0=int(_merge(args, config, "grid-t0", 64)),
        grid_v=int(_merge(args, config, "grid-v", 128)),
    )
    orbits = find_orbits(alpha, F, m, n, search_box=box, opts=opts)
    reports = [verify_orbit(alpha, F, o) for o in orbits]
    keep = [(o, r) for o, r in zip(orbits, reports) if r.passed]
    with _out_stream(args.out) as fh:
        export.write_orbits_json([o for o, _ in keep], fh, reports=[r for _, r in keep])
    if not keep:
        print(f"no verified ({m},{n})-orbit found", file=sys.stderr)
        return EXIT_NOT_FOUND
    return EXIT_OK


# --- verify suites -------------------------------------------------------

def _check(name, value, tol, ok=None):
    passed = bool(value < tol) if ok is None else bool(ok)
    return {"name": name, "value": float(value), "tolerance": float(tol), "passed": passed}


def _suite_potential(_seed) -> list[dict]:
    checks = []
    for alpha in (0.25, 0.5, 0.75):
        P = PowerLawPotential(alpha=alpha, p0=-1.0)
        us = np.geomspace(1e-3, 1e3, 41)
        rel = 0.0
        for u in us:
            ref = schaaf_expression_closed_form(P, float(u))
            # magnitude of the separate terms; the alpha=1/2 reference is 0
            scale = alpha**2 * (alpha + 1.0) * float(u) ** (-2.0 * (alpha + 2.0))
            rel = max(rel, abs(schaaf_expression(P, float(u)) - ref) / scale)
        checks.append(_check(f"schaaf_closed_form[alpha={alpha}]", rel, 1e-10))
        worst = 0.0
        for h in np.linspace(P.h_center * 0.95, 2.0, 13):
            u_minus, u_plus = turning_points(P, float(h))
            res = abs(P.value(u_plus) - h)
            if u_minus is not None:
                res = max(res, abs(P.value(u_minus) - h))
            worst = max(worst, res / max(1.0, abs(h)))
        checks.append(_check(f"turning_residual[alpha={alpha}]", worst, 1e-12))
        checks.append(
            _check(f"outer_zero[alpha={alpha}]", abs(P.value(P.u_zero)), 1e-12)
        )
        fd_worst = 0.0
        for u in (0.3, 1.1, 4.7):
            v, dv, d2v, _, _ = eval_derivatives(P, u)
            e = 1e-6 * u
            fd1 = (P.value(u + e) - P.value(u - e)) / (2 * e)
            fd2 = (P.dV(u + e) - P.dV(u - e)) / (2 * e)
            fd_worst = max(fd_worst, abs(fd1 - dv) / max(1.0, abs(dv)), abs(fd2 - d2v) / max(1.0, abs(d2v)))
        checks.append(_check(f"derivative_fd[alpha={alpha}]", fd_worst, 1e-6))
    return checks


def _suite_period(_seed) -> list[dict]:
    checks = []
    for p0 in (-0.5, -1.0, -2.0):
        P = PowerLawPotential(alpha=0.5, p0=p0)
        rel = 0.0
        for h in np.linspace(P.h_center * 0.9, -1e-3, 12):
            rel = max(rel, abs(period_extended(P, float(h)).T / period_closed_form_half(p0, float(h)) - 1))
        for h in np.linspace(1e-3, 50.0, 12):
            rel = max(rel, abs(period_extended(P, float(h)).T / period_closed_form_half(p0, float(h)) - 1))
        checks.append(_check(f"closed_form_oracle[p0={p0}]", rel, 1e-8))
    P = PowerLawPotential(alpha=0.5, p0=-1.0)
    gap = abs(period_extended(P, 1e-6).T - period_extended(P, -1e-6).T)
    checks.append(_check("value_continuity_at_h0", gap, 1e-3))
    scan = monotonicity_scan(P, np.linspace(-0.9, -0.1, 9))
    checks.append(_check("isochronous_branch_constant", 0.0, 1.0, ok=scan.kind == "constant"))
    return checks


def _suite_collision(_seed) -> list[dict]:
    alpha = 0.5
    F = Forcing.constant(-1.0)
    delta = default_delta(alpha, F.p1)
    _, _, state = integrate_classical(alpha, F, 0.0, 9.0, 0.0, 50.0, dense=False)
    t_d, u_d, v_d = state
    w = 0.5 * v_d * v_d + singular_part(alpha, u_d)
    hit = cross_collision(alpha, F, t_d, w, "incoming", delta)
    rel = abs(hit.v + math.sqrt(6.0)) / math.sqrt(6.0)
    checks = [_check("collision_speed_sqrt6", rel, 1e-9)]

    half = continue_bouncing(alpha, F, 0.0, math.sqrt(2.0), 30.0)
    refl = max((abs(c.v_out + c.v_in) / abs(c.v_in) for c in half.collisions), default=0.0)
    checks.append(_check("elastic_reflection", refl, 1e-10))
    gaps = np.diff([0.0] + half.collision_times)
    tb = period_closed_form_half(-1.0, 1.0)
    checks.append(_check("collision_gaps_Tb", float(np.max(np.abs(gaps - tb))), 1e-8))
    return checks


def _suite_sandwich(_seed) -> list[dict]:
    rep = sandwich_check(0.5, Forcing.cosine(-2.0, 0.1), 3.0)
    return [
        _check("confinement", max(rep.max_violation_low, rep.max_violation_high), rep.slack),
        _check("interleaving", 0.0, 1.0, ok=rep.interleaving_ok),
        _check(
            "collision_speed_bracket",
            0.0,
            1.0,
            ok=rep.speeds_forward[2] <= rep.speeds_forward[0] <= rep.speeds_forward[1],
        ),
    ]


def _suite_lift(_seed) -> list[dict]:
    alpha, F = 0.5, Forcing.cosine(-2.0, 0.1)
    worst = 0.0
    for t0 in np.linspace(0.0, 2.0 * math.pi, 6, endpoint=False):
        for v0 in np.geomspace(1.5, 6.0, 6):
            a = successor(alpha, F, SectionPoint(float(t0), float(v0)))
            b = successor(alpha, F, SectionPoint(float(t0) + 2.0 * math.pi, float(v0)))
            worst = max(worst, abs(b.t - a.t - 2.0 * math.pi), abs(b.v - a.v))
    return [_check("lift_periodicity", worst, 1e-9)]


def _suite_area(_seed) -> list[dict]:
    alpha = 0.5
    rep = jacobian(alpha, Forcing.constant(-1.0), SectionPoint(0.0, math.sqrt(2.0)))
    checks = [_check("autonomous_det", abs(rep.det_tE - 1.0), 1e-5)]
    F = Forcing.cosine(-2.0, 0.1)
    dets = []
    for t0 in np.linspace(0.0, 2.0 * math.pi, 3, endpoint=False):
        for v0 in np.geomspace(2.0, 6.0, 3):
            dets.append(jacobian(alpha, F, SectionPoint(float(t0), float(v0))).det_tE)
    med = float(np.median(np.abs(np.array(dets) - 1.0)))
    checks.append(_check("nonautonomous_det_median", med, 1e-4))
    return checks


def _suite_ladder(_seed) -> list[dict]:
    alpha, F = 0.5, Forcing.cosine(-2.0, 0.1)
    ladder = gamma_ladder(alpha, F.p1, F.p2, 3)
    rng = np.random.default_rng(_seed)
    failures = 0
    trials = 10
    for _ in range(trials):
        t0 = float(rng.uniform(0.0, 2.0 * math.pi))
        v0 = float(ladder.top * (1.0 + rng.uniform(0.001, 1.0)))
        try:
            successor_iterate(alpha, F, SectionPoint(t0, v0), 3, tol=SCAN_TOL)
        except Exception:
            failures += 1
    checks = [_check("three_impacts_certified", failures, 1)]
    checks.append(
        _check("ladder_increasing", 0.0, 1.0, ok=all(b > a for a, b in zip(ladder.thresholds, ladder.thresholds[1:])))
    )
    return checks


def _suite_autonomous(_seed) -> list[dict]:
    alpha, F = 0.5, Forcing.constant(-1.0)
    worst_v, worst_t = 0.0, 0.0
    for v0 in (1.2, math.sqrt(2.0), 3.0):
        s = successor(alpha, F, SectionPoint(0.25, v0))
        worst_v = max(worst_v, abs(s.v - v0))
        worst_t = max(worst_t, abs(s.t - 0.25 - period_closed_form_half(-1.0, 0.5 * v0 * v0)))
    return [
        _check("speed_conserved", worst_v, 1e-9),
        _check("advance_equals_Tb", worst_t, 1e-8),
    ]


_SUITES = {
    "potential": _suite_potential,
    "period": _suite_period,
    "collision": _suite_collision,
    "sandwich": _suite_sandwich,
    "lift": _suite_lift,
    "area": _suite_area,
    "ladder": _suite_ladder,
    "autonomous": _suite_autonomous,
}


def cmd_verify(args) -> int:
    config = _load_config(args)
    names = args.suite or list(_SUITES)
    unknown = [n for n in names if n not in _SUITES]
    if unknown:
        print(f"unknown suite(s): {unknown}; available: {sorted(_SUITES)}", file=sys.stderr)
        return EXIT_USAGE
    report = {}
    all_ok = True
    for name in names:
        checks = _SUITES[name](args.seed)
        report[name] = checks
        all_ok &= all(c["passed"] for c in checks)
    with _out_stream(args.out) as fh:
        json.dump(report, fh, indent=1)
        fh.write("\n")
    return EXIT_OK if all_ok else EXIT_NUMERICAL


_COMMANDS = {
    "period": cmd_period,
    "simulate": cmd_simulate,
    "successor": cmd_successor,
    "find": cmd_find,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (GuardError, DomainError, RegimeError, BoundsError) as exc:
        print(f"domain/guard error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (QuadratureError, NumericalError, NoCollisionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
