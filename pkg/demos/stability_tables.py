"""Deficit, bounded-Lipschitz distance and J_beta masses for barriers of the square.

The barriers are random segment sets blown up just past the point where
they become weak barriers, plus the Steiner barrier and half the boundary.

Run:  python demos/stability_tables.py [n_random]
"""
import math
import sys

import numpy as np

from barrierkit import stability_report
from barrierkit.samples import random_weak_barrier
from barrierkit.scenarios import half_boundary, steiner_barrier, unit_square

Q = unit_square()
rng = np.random.default_rng(0)
n = int(sys.argv[1]) if len(sys.argv) > 1 else 8
cases = [("steiner", steiner_barrier()), ("half boundary", half_boundary(Q))]
cases += [(f"random {i}", random_weak_barrier(Q, rng=rng, slack=(1.0, 1.2))) for i in range(n)]

print(f"{'barrier':>14} {'deficit':>9} {'dbl':>9} {'dbl/d^e':>9} {'J(pi/8)':>9} {'2d/(1-cos)':>11}")
for name, B in cases:
    r = stability_report(B, Q)
    row = r.beta_table[3]  # beta = pi/8
    ratio = "equality" if r.equality_case else f"{r.ratio:.4f}"
    print(f"{name:>14} {r.deficit:9.4f} {r.dbl:9.4f} {ratio:>9} {row['jbeta_mass']:9.4f} "
          f"{row['steiner_bound']:11.4f}")

print()
print("beta table for the Steiner barrier:")
print(stability_report(steiner_barrier(), Q).beta_csv())
print(f"(pi/8 = {math.pi / 8:.6f})")
