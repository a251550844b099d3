"""The shortest known barrier of the unit square, taken apart.

Run:  python demos/steiner_square.py [out.svg]
"""
import sys

import numpy as np

from barrierkit import (blaschke_measure, convexify_2d, is_weak_barrier, jones_deficit,
                        orientation_measure, projection_body, strong_barrier_mc)
from barrierkit.io import render_svg
from barrierkit.scenarios import steiner_barrier, unit_square

Q = unit_square()
B = steiner_barrier()
print(f"barrier: {len(B)} segments, total length {B.length():.6f}")
print(f"half the perimeter of Q is {Q.perimeter() / 2:.1f}, so the deficit is {jones_deficit(B, Q):.6f}")

# co(B) is the zonogon of the segment vectors; its perimeter is twice |B|
co = convexify_2d(B)
print(f"co(B) has {len(co.vertices)} vertices and perimeter {co.perimeter():.6f}")

# weak barrier <=> Pi Q inside Pi co(B); in the plane both are polygons
PiQ = projection_body(blaschke_measure(Q))
PiB = projection_body(orientation_measure(B))
slack = PiB.containment_margin(PiQ.vertices)[0]
print(f"Pi Q vertices inside Pi co(B) with slack {slack:.2e}")
print("verdict:", is_weak_barrier(B, Q).verdict.value)

# the touching directions are where the barrier is exactly long enough
U = PiQ.vertices / np.linalg.norm(PiQ.vertices, axis=1, keepdims=True)
print("support gap at Pi Q's vertex directions:", np.round(PiB.support(U) - PiQ.support(U), 6))

# a line-sampling sanity check that B is an honest barrier
est = strong_barrier_mc(B, Q, N=50_000, seed=0)
print(f"random lines missing B: {est.misses} of {est.lines}; mean hits {est.mean_multiplicity:.4f}")

if len(sys.argv) > 1:
    with open(sys.argv[1], "w") as fh:
        fh.write(render_svg(B, Q, co))
    print("wrote", sys.argv[1])
