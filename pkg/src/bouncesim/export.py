"""CSV and JSON writers for the computed artifacts.

All numbers are written with 17 significant digits and '.' decimals so that
doubles round-trip exactly and identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
from typing import Iterable, TextIO

import numpy as np

from .finder import PeriodicOrbit, VerificationReport
from .integrator import BounceTrajectory, ClassicalArc, CrossingLeg
from .period import PeriodSample

__all__ = [
    "fmt",
    "write_period_csv",
    "write_trajectory_csv",
    "write_trajectory_json",
    "write_collisions_jsonl",
    "write_successor_grid_csv",
    "orbits_to_json",
    "write_orbits_json",
]


def fmt(x: float) -> str:
    return f"{x:.17g}"


def write_period_csv(samples: Iterable[PeriodSample], fh: TextIO) -> None:
    fh.write("h,T,regime,err\n")
    for s in samples:
        fh.write(f"{fmt(s.h)},{fmt(s.T)},{s.regime.value},{fmt(s.quadrature_error_estimate)}\n")


def _trajectory_rows(traj: BounceTrajectory, points_per_arc: int = 200, points_per_leg: int = 25):
    for seg_id, seg in enumerate(traj.segments):
        if isinstance(seg, ClassicalArc):
            ts = np.linspace(seg.t_lo, seg.t_hi, points_per_arc)
            for t in ts:
                u, v = seg.eval(float(t))
                yield float(t), u, v, seg_id
        elif isinstance(seg, CrossingLeg):
            us = np.linspace(seg.u_lo, seg.u_hi, points_per_leg)
            rows = []
            for u in us:
                t, _, v = seg.state_at_u(float(u))
                rows.append((t, float(u), v, seg_id))
            rows.sort(key=lambda r: r[0])
            yield from rows


def write_trajectory_csv(traj: BounceTrajectory, fh: TextIO, **kw) -> None:
    fh.write("t,u,v,segment_id\n")
    for t, u, v, seg_id in _trajectory_rows(traj, **kw):
        fh.write(f"{fmt(t)},{fmt(u)},{fmt(v)},{seg_id}\n")


def write_trajectory_json(traj: BounceTrajectory, fh: TextIO, **kw) -> None:
    rows = [
        {"t": t, "u": u, "v": v, "segment_id": seg_id}
        for t, u, v, seg_id in _trajectory_rows(traj, **kw)
    ]
    json.dump({"status": traj.status, "samples": rows}, fh, indent=1)
    fh.write("\n")


def write_collisions_jsonl(traj: BounceTrajectory, fh: TextIO) -> None:
    for c in traj.collisions:
        fh.write(
            json.dumps(
                {"t_hit": c.t_hit, "v_in": c.v_in, "v_out": c.v_out, "energy": c.energy}
            )
            + "\n"
        )


def write_successor_grid_csv(rows: Iterable[tuple], fh: TextIO) -> None:
    """Rows are (t0, v0, t_out, v_out, delta, det); det may be nan."""
    fh.write("t0,v0,t_out,v_out,delta,det\n")
    for t0, v0, t_out, v_out, delta, det in rows:
        fh.write(
            f"{fmt(t0)},{fmt(v0)},{fmt(t_out)},{fmt(v_out)},{fmt(delta)},{fmt(det)}\n"
        )


def orbits_to_json(orbits: list[PeriodicOrbit], reports: list[VerificationReport] | None = None) -> list[dict]:
    out = []
    for i, orb in enumerate(orbits):
        d = orb.to_dict()
        if reports is not None:
            rep = reports[i]
            d["verified"] = rep.passed
            d["impact_count"] = rep.impact_count
            d["periodicity_sup"] = rep.periodicity_sup
        out.append(d)
    return out


def write_orbits_json(orbits, fh: TextIO, reports=None) -> None:
    json.dump(orbits_to_json(orbits, reports), fh, indent=1)
    fh.write("\n")
