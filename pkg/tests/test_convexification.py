import math

import numpy as np
import pytest

from barrierkit.convexification import convexify, convexify_2d, solve_minkowski
from barrierkit.errors import DegenerateError, InvalidDataError, NotConvergedError
from barrierkit.geometry import Polytope
from barrierkit.measures import (Barrier, DirectionalMeasure, orientation_measure,
                                 surface_area_measure)
from barrierkit.samples import random_segments, random_symmetric_polytope


def hausdorff(A, B):
    d = np.linalg.norm(A[:, None] - B[None], axis=2)
    return max(d.min(axis=0).max(), d.min(axis=1).max())


def test_steiner_convexification(steiner):
    co = convexify_2d(steiner)
    # the two half-diagonal pieces are parallel, so co(B) is a hexagon
    assert len(co.vertices) == 6
    assert co.perimeter() == pytest.approx(2 * steiner.length())
    assert co.is_origin_symmetric()


def test_orthogonal_segments_give_square():
    B = Barrier([[[0, 0], [1, 0]], [[5, 5], [5, 6]]])
    co = convexify_2d(B)
    assert co.volume() == pytest.approx(1)
    assert sorted(map(tuple, np.round(co.vertices, 12))) == [(-.5, -.5), (-.5, .5), (.5, -.5), (.5, .5)]


def test_both_diagonals():
    B = Barrier([[[-.5, -.5], [.5, .5]], [[-.5, .5], [.5, -.5]]])
    co = convexify_2d(B)
    assert sorted(map(tuple, np.round(co.vertices, 12))) == [(-1, 0), (0, -1), (0, 1), (1, 0)]


def test_single_segment_is_degenerate():
    with pytest.raises(DegenerateError):
        convexify(Barrier([[[0, 0], [1, 1]]]))


def test_translation_invariance(rng):
    B = random_segments(5, rng)
    moved = B.translate_piece(2, [3.0, -1.0])
    assert np.allclose(convexify_2d(B).vertices, convexify_2d(moved).vertices)


def test_perimeter_identity_random(rng):
    for _ in range(50):
        B = random_segments(int(rng.integers(2, 9)), rng)
        if np.linalg.matrix_rank(B.segment_vectors, tol=1e-9) < 2:
            continue
        assert convexify_2d(B).perimeter() == pytest.approx(2 * B.length(), abs=1e-9)


@pytest.mark.parametrize("P", [
    Polytope([[x, y, z] for x in (-.5, .5) for y in (-.5, .5) for z in (-.5, .5)]),
    Polytope(np.vstack([np.eye(3), -np.eye(3)])),
], ids=["cube", "octahedron"])
def test_known_bodies(P):
    sol = solve_minkowski(surface_area_measure(P))
    assert sol.residual < 1e-6
    assert hausdorff(sol.polytope.vertices, P.vertices) < 1e-5
    assert sol.vanished == []


def test_random_round_trips(rng):
    for _ in range(10):
        P = random_symmetric_polytope(3, rng=rng)
        sol = solve_minkowski(surface_area_measure(P))
        assert sol.residual < 1e-6
        assert hausdorff(sol.polytope.vertices, P.vertices) < 1e-5


def test_solution_history_decreases(cube):
    P = random_symmetric_polytope(3, 7, np.random.default_rng(5))
    sol = solve_minkowski(surface_area_measure(P))
    res = [r for _, r in sol.history]
    assert res[-1] < res[0]


def test_cube_boundary_convexifies_to_scaled_cube(cube):
    co = convexify(Barrier.from_polytope_boundary(cube))
    # S*(dC) = 2 S(C), so co(B) = sqrt 2 C
    assert co.volume() == pytest.approx(2 ** 1.5)


def test_invalid_data():
    with pytest.raises(InvalidDataError):
        solve_minkowski(DirectionalMeasure([[0, 0, 1], [0, 0, -1]], [1, 1]))
    with pytest.raises(InvalidDataError):
        solve_minkowski(DirectionalMeasure([[1, 0], [-1, 0], [0, 1], [0, -1]], [1, 1, 1, 1]))


def test_not_converged_carries_solution():
    P = random_symmetric_polytope(3, 8, np.random.default_rng(3))
    with pytest.raises(NotConvergedError) as info:
        solve_minkowski(surface_area_measure(P), max_iter=1, tol=1e-14)
    assert info.value.solution is not None
    assert math.isfinite(info.value.solution.residual)
