"""Periodic bouncing orbits: the harmonic pair and a 3-impact subharmonic.

For p(t) = -2 + 0.1 cos t the single-impact search at the forcing period
finds two distinct orbits (one at each extremal phase of the forcing).  With
three impacts per two forcing periods the search returns six fixed points of
the third iterate that group into two genuine orbits; each orbit contributes
every one of its impacts as a separate fixed point.

Every orbit is re-integrated over two full periods and checked for impact
count, elastic reflection and periodicity before being reported.

Outputs: demos/output/orbits.json, periodic_orbits.png
"""

import math
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from bouncesim import FinderOptions, Forcing, continue_bouncing, find_orbits, minimal_m, verify_orbit
from bouncesim.export import write_orbits_json

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

alpha = 0.5
F = Forcing.cosine(-2.0, 0.1)
lean = FinderOptions(grid_t0=24, grid_v=48)

print("searching single-impact orbits at the forcing period (m=1, n=1) ...")
harmonics = find_orbits(alpha, F, 1, 1, opts=lean)
print("searching 3-impact orbits, period multiple from the rotation bound ...")
m3 = minimal_m(alpha, F, 3)
subharmonics = find_orbits(alpha, F, m3, 3, opts=lean)

all_orbits = harmonics + subharmonics
reports = [verify_orbit(alpha, F, o) for o in all_orbits]
with open(OUT / "orbits.json", "w") as fh:
    write_orbits_json(all_orbits, fh, reports)

for o, rep in zip(all_orbits, reports):
    print(
        f"  (m={o.m}, n={o.n}) t0={o.t0 % (2 * math.pi):.4f} v0={o.v0:.6f} "
        f"residual={o.residual:.1e} class={o.orbit_class} verified={rep.passed}"
    )

fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 6), sharex=False)

for o in harmonics:
    period = 2.0 * math.pi * o.m
    traj = continue_bouncing(alpha, F, o.t0, o.v0, o.t0 + 2.0 * period)
    ts = np.linspace(o.t0, o.t0 + 2.0 * period, 600)
    ax1.plot(ts - o.t0, [traj.eval(float(t))[0] for t in ts], lw=1.0,
             label=f"t0 = {o.t0 % (2 * math.pi):.3f}")
ax1.set_title("harmonic orbits: one impact per forcing period (two periods shown)")
ax1.set_ylabel("u")
ax1.legend(fontsize=8)

plotted = set()
for o in subharmonics:
    if o.orbit_class in plotted:
        continue
    plotted.add(o.orbit_class)
    period = 2.0 * math.pi * o.m
    traj = continue_bouncing(alpha, F, o.t0, o.v0, o.t0 + period)
    ts = np.linspace(o.t0, o.t0 + period, 600)
    ax2.plot(ts - o.t0, [traj.eval(float(t))[0] for t in ts], lw=1.0,
             label=f"class {o.orbit_class}, v0 = {o.v0:.3f}")
ax2.set_title(f"3-impact subharmonics over 2*{m3}*pi (one representative per orbit class)")
ax2.set_xlabel("t - t0")
ax2.set_ylabel("u")
ax2.legend(fontsize=8)

fig.tight_layout()
fig.savefig(OUT / "periodic_orbits.png", dpi=150)
print(f"wrote {OUT/'periodic_orbits.png'} and orbits.json")
