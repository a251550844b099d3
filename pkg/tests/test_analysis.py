import math

import numpy as np
import pytest

from barrierkit.analysis import (Verdict, cylinder, cylinder_counterexample, is_weak_barrier,
                                 is_weak_barrier_2d_prop1, jones_deficit, mc_multiplicity_area,
                                 multiplicity_projection_area, strong_barrier_mc,
                                 weak_barrier_gap)
from barrierkit.errors import DegenerateError
from barrierkit.geometry import circle_directions, icosphere
from barrierkit.measures import Barrier
from barrierkit.samples import random_polytope, random_weak_barrier
from barrierkit.scenarios import half_boundary


def test_steiner_is_weak_barrier(steiner, square):
    v = is_weak_barrier(steiner, square)
    assert v.verdict is Verdict.TRUE and bool(v)
    assert jones_deficit(steiner, square) == pytest.approx(0.638958, abs=1e-6)


def test_boundary_is_weak_barrier(square):
    assert is_weak_barrier(Barrier.from_polytope_boundary(square), square)


def test_half_boundary_is_weak_barrier(square):
    B = half_boundary(square)
    assert is_weak_barrier(B, square).verdict is Verdict.TRUE
    assert jones_deficit(B, square) == pytest.approx(0)


def test_diagonal_segment_fails(square):
    v = is_weak_barrier(Barrier([[[-.5, -.5], [.5, .5]]]), square)
    assert v.verdict is Verdict.FALSE
    assert abs(abs(v.witness @ np.array([1, 1])) / math.sqrt(2) - 1) < 1e-12
    assert v.margin < 0


def test_both_diagonals_weak(square):
    B = Barrier([[[-.5, -.5], [.5, .5]], [[-.5, .5], [.5, -.5]]])
    assert is_weak_barrier(B, square).verdict is Verdict.TRUE


def test_shrunk_boundary_fails_with_negative_gap(square):
    B = Barrier.from_polytope_boundary(square, 0.4)
    v = is_weak_barrier(B, square)
    assert v.verdict is Verdict.FALSE
    assert weak_barrier_gap(B, square, v.witness) < 0


def test_gap_equals_projection_difference(steiner, square):
    U = circle_directions(64)
    g = weak_barrier_gap(steiner, square, U)
    assert np.allclose(g, multiplicity_projection_area(steiner, U) - np.abs(U).sum(axis=1))
    assert np.all(g >= -1e-12)


def test_prop1_agrees(rng):
    for _ in range(40):
        K = random_polytope(2, rng=rng)
        B = random_weak_barrier(K, rng=rng, slack=(0.8, 1.2))
        assert is_weak_barrier(B, K).verdict == is_weak_barrier_2d_prop1(B, K).verdict


def test_dimension_mismatch(square, cube):
    with pytest.raises(ValueError):
        is_weak_barrier(Barrier.from_polytope_boundary(cube), square)


def test_cube_barriers(cube):
    assert is_weak_barrier(Barrier.from_polytope_boundary(cube), cube).verdict is Verdict.TRUE
    half = Barrier.from_polytope_boundary(cube, 1 / math.sqrt(2))
    assert is_weak_barrier(half, cube).verdict is Verdict.TRUE
    small = Barrier.from_polytope_boundary(cube, 0.7)
    v = is_weak_barrier(small, cube)
    assert v.verdict is Verdict.FALSE and v.witness is not None


def test_net_certificate_in_space(cube):
    # a rotated cube boundary: no atom shortcut, so the net has to certify
    c, s = math.cos(0.3), math.sin(0.3)
    R = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
    from barrierkit.geometry import Polytope

    rot = Polytope(cube.vertices @ R.T)
    v = is_weak_barrier(Barrier.from_polytope_boundary(rot, 1.2), cube)
    assert v.verdict is Verdict.TRUE and v.net_level is not None and v.margin >= 0


def test_undecided_at_low_resolution(cube):
    # a coarse net cannot certify a positive but small gap
    from barrierkit.geometry import Polytope

    c, s = math.cos(0.3), math.sin(0.3)
    R = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
    rot = Polytope(cube.vertices @ R.T)
    B = Barrier.from_polytope_boundary(rot, 1.05)
    v = is_weak_barrier(B, cube, level=0, max_level=0)
    assert v.verdict is Verdict.UNDECIDED and not bool(v)
    assert is_weak_barrier(B, cube).verdict is Verdict.TRUE


def test_degenerate_body():
    from barrierkit.geometry import Polytope

    with pytest.raises(DegenerateError):
        is_weak_barrier(Barrier([[[0, 0], [1, 0]]]), Polytope([[0, 0], [1, 0]]))


def test_strong_barrier_mc(square):
    full = strong_barrier_mc(Barrier.from_polytope_boundary(square), square, N=20_000, seed=1)
    assert full.misses == 0
    assert full.mean_multiplicity == pytest.approx(2.0)
    half = strong_barrier_mc(half_boundary(square), square, N=20_000, seed=1)
    assert abs(half.miss_fraction - 0.5) < 0.03
    lo, hi = half.ci95
    assert lo <= half.miss_fraction <= hi


def test_strong_barrier_mc_reproducible(steiner, square):
    a = strong_barrier_mc(steiner, square, N=5000, seed=7)
    b = strong_barrier_mc(steiner, square, N=5000, seed=7)
    assert a == b
    assert a.misses == 0


def test_strong_barrier_in_space(cube):
    est = strong_barrier_mc(Barrier.from_polytope_boundary(cube), cube, N=5000, seed=3)
    assert est.misses == 0 and est.mean_multiplicity == pytest.approx(2.0)


def test_mc_multiplicity_area(steiner):
    u = np.array([1.0, 0.0])
    est, se = mc_multiplicity_area(steiner, u, N=50_000, seed=2)
    exact = multiplicity_projection_area(steiner, u)
    assert abs(est - exact) < 4 * se + 1e-12


def test_cylinder_shape():
    K = cylinder(3.0, 1 / 6)
    assert K.volume() == pytest.approx(3 * 64 / 2 * (1 / 6) ** 2 * math.sin(2 * math.pi / 64))


@pytest.mark.parametrize("s", [2.2, 3.0])
def test_cylinder_counterexample(s):
    rep = cylinder_counterexample(s)
    assert rep.ok
    assert rep.projection_inclusion.verdict is Verdict.TRUE
    assert rep.projection_inclusion.net_level <= 6
    assert not rep.blaschke_contained and rep.violation > 0
    assert rep.max_projection_area <= 1 + 1 / s ** 2 < 2 * math.pi
    assert abs(rep.ball_projection_area - math.pi) < 0.02


def test_cylinder_needs_long_axis():
    with pytest.raises(ValueError):
        cylinder_counterexample(1.5)
