"""Rebuilding a symmetric polytope from its facet areas and normals.

Run:  python demos/minkowski_round_trip.py
"""
import time

import numpy as np

from barrierkit import solve_minkowski, surface_area_measure
from barrierkit.samples import random_symmetric_polytope

rng = np.random.default_rng(7)
for pairs in (4, 8, 16, 32):
    P = random_symmetric_polytope(3, pairs, rng)
    t = time.perf_counter()
    sol = solve_minkowski(surface_area_measure(P))
    dt = time.perf_counter() - t
    d = np.linalg.norm(sol.polytope.vertices[:, None] - P.vertices[None], axis=2)
    err = max(d.min(axis=0).max(), d.min(axis=1).max())
    print(f"{len(P.normals):4d} facets: {sol.iterations:3d} iterations, residual {sol.residual:.1e}, "
          f"vertex error {err:.1e}, {dt * 1000:.0f} ms")

print("\nresidual by iteration for the last solve:")
for it, r in sol.history:
    print(f"  {it:3d}  {r:.3e}")
