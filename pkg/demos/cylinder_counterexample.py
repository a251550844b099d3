"""A thin cylinder K for which the ball's convexification is a weak barrier,
even though it does not contain the Blaschke body of K.

Run:  python demos/cylinder_counterexample.py
"""
import math

from barrierkit import cylinder_counterexample

print(f"{'s':>5} {'net':>4} {'certified':>10} {'outside by':>11} {'max area':>9} {'1+1/s^2':>8}")
for s in (2.2, 3.0, 5.0, 10.0):
    rep = cylinder_counterexample(s)
    inc = rep.projection_inclusion
    print(f"{s:5.1f} {inc.net_level:4d} {inc.margin:10.4f} {rep.violation:11.4f} "
          f"{rep.max_projection_area:9.4f} {rep.projection_area_bound:8.4f}")

# the ball's shadows all have area close to pi, far above the cylinder's
rep = cylinder_counterexample(3.0)
print(f"smallest shadow of the polyhedral ball: {rep.ball_projection_area:.4f} (pi = {math.pi:.4f})")
print("cylinder vertex outside the ball:", rep.violating_vertex.round(4))
