"""
Synchronizing the ten-cell example
==================================

The bundled ``example-10`` digraph has ten cells with the general on cell 1.
We run the synchronization program, look at a few snapshots and check the
verdict.
"""

from simplex_fssp import build_fssp_program, check_synchronization, initial_configuration, metrics, run
from simplex_fssp.topology import depths, golden

d = golden("example-10")
m = metrics(d)
print("N =", m.size, " e_g =", m.eccentricity, " D =", m.diameter)
print("BFS depths:", depths(d))

trace = run(initial_configuration(d), build_fssp_program(), d, max_steps=1000)
report = check_synchronization(trace)
print(report.summary())

# states along the way; every cell sits in S0 until the wave reaches it
for k in (0, 1, 9, 12, 18, 22, 25, report.firing_step - 1, report.firing_step):
    print(f"{k:3d}", " ".join(trace.snapshot(k).states()[c] for c in sorted(d.nodes)))
