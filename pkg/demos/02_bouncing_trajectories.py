"""Bouncing trajectories and the constant-forcing envelope.

Left panel: a solution launched from the singularity with the periodic
forcing p(t) = -2 + 0.1 cos t, with the elastic collisions marked.  The
collision machinery hands the state across a small neighborhood of u = 0 in
position-energy variables, so every impact has a well-defined time and a
finite reflected speed.

Right panel: starting from rest at u0 = 3, the forced solution (solid) stays
between the solutions of the two constant-forcing systems at the certified
bounds p1 = -1.9 and p2 = -2.1 (dashed), and its collision time is bracketed
by theirs.

Outputs: demos/output/trajectories.png and trajectory.csv / collisions.jsonl
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from bouncesim import Forcing, continue_bouncing, sandwich_check
from bouncesim.export import write_collisions_jsonl, write_trajectory_csv

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

alpha = 0.5
F = Forcing.cosine(-2.0, 0.1)

traj = continue_bouncing(alpha, F, 0.0, 4.0, 40.0)
print(f"collisions at: {[f'{t:.3f}' for t in traj.collision_times]}")
print(f"reflected speeds: {[f'{c.v_out:.4f}' for c in traj.collisions]}")

with open(OUT / "trajectory.csv", "w") as fh:
    write_trajectory_csv(traj, fh)
with open(OUT / "collisions.jsonl", "w") as fh:
    write_collisions_jsonl(traj, fh)

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))

ts = np.linspace(0.0, traj.t_end, 1200)
us = [traj.eval(float(t))[0] for t in ts]
ax1.plot(ts, us, lw=0.9)
for c in traj.collisions:
    ax1.plot(c.t_hit, 0.0, "rv", ms=6)
ax1.set_xlabel("t")
ax1.set_ylabel("u(t)")
ax1.set_title("bouncing solution, p(t) = -2 + 0.1 cos t")

rep = sandwich_check(alpha, F, 3.0)
t1, t12, t11 = rep.t_hits_forward
print(f"forward collision {t1:.6f} bracketed by [{t12:.6f}, {t11:.6f}]")

horizon = 0.999 * t12  # common domain: before the earliest collision
for G, style, label in (
    (F, "-", "forced"),
    (Forcing.constant(F.p1), "--", "p = p1 (mild)"),
    (Forcing.constant(F.p2), "--", "p = p2 (strong)"),
):
    tr = continue_bouncing(alpha, G, 0.0, 0.0, horizon, u0=3.0)
    tt = np.linspace(0.0, tr.t_end, 400)
    ax2.plot(tt, [tr.eval(float(t))[0] for t in tt], style, lw=1.0, label=label)
ax2.set_xlabel("t")
ax2.set_ylabel("u(t)")
ax2.set_title("confinement between constant-forcing envelopes")
ax2.legend(fontsize=8)

fig.tight_layout()
fig.savefig(OUT / "trajectories.png", dpi=150)
print(f"wrote {OUT/'trajectories.png'}")
