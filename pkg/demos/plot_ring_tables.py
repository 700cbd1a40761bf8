"""
Step counts on the ring families
================================

Each generator takes the node count N.  For the simple ring the firing
step grows as N^2 + 6N + 2, and the ring of 2-rings tracks it closely.
"""

from simplex_fssp import family, metrics
from simplex_fssp.experiments import EXPECTED, firing_step

print(" N  e_g   D  steps  N^2+6N+2")
for n in range(2, 16):
    d = family("ring", n)
    m = metrics(d)
    print(f"{n:2d} {m.eccentricity:4d} {m.diameter:3d} {firing_step(d):6d} {n * n + 6 * n + 2:9d}")

# the tables shipped with the package, compared row by row
for name, rows in EXPECTED.items():
    hits = sum(firing_step(family(name, n)) == want[2] for n, want in rows.items())
    print(f"{name:10s} {hits}/{len(rows)} rows reproduced")
