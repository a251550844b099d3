"""Random instances for experiments and property checks."""
from __future__ import annotations

import numpy as np

from .geometry import Polytope
from .measures import Barrier, blaschke_measure, projection_body


def _rng(rng):
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def random_polytope(n: int, m: int | None = None, rng=None) -> Polytope:
    """Hull of m Gaussian points (full-dimensional, generally not symmetric)."""
    rng = _rng(rng)
    m = m or int(rng.integers(n + 2, 12))
    while True:
        P = Polytope(rng.normal(size=(m, n)))
        if not P.is_degenerate and P.volume() > 1e-3:
            return P


def random_symmetric_polytope(n: int, pairs: int | None = None, rng=None) -> Polytope:
    rng = _rng(rng)
    pairs = pairs or int(rng.integers(n, 9))
    while True:
        X = rng.normal(size=(pairs, n))
        P = Polytope(np.vstack([X, -X]))
        if not P.is_degenerate and P.volume() > 1e-3:
            return P


def random_nested_symmetric_pair(n: int, rng=None) -> tuple[Polytope, Polytope]:
    """(K', K) with K' inside K, both origin-symmetric.

    K' is spanned by random convex combinations of K's vertices and their
    reflections.
    """
    rng = _rng(rng)
    K = random_symmetric_polytope(n, rng=rng)
    V = K.vertices
    while True:
        W = rng.dirichlet(np.ones(len(V)), size=int(rng.integers(n, 9)))
        P = W @ V
        Kp = Polytope(np.vstack([P, -P]))
        if not Kp.is_degenerate:
            return Kp, K


def random_segments(k: int, rng=None, box: float = 0.5, max_length: float = 1.0) -> Barrier:
    """k segments with uniform centers in [-box, box]^2 and random directions."""
    rng = _rng(rng)
    c = rng.uniform(-box, box, size=(k, 2))
    t = rng.uniform(0, np.pi, size=k)
    L = rng.uniform(0.05, max_length, size=k)
    d = 0.5 * L[:, None] * np.stack([np.cos(t), np.sin(t)], axis=1)
    return Barrier(np.stack([c - d, c + d], axis=1))


def weak_barrier_scale(B: Barrier, K: Polytope) -> float:
    """Smallest t with t*B a weak barrier of K (planar barriers).

    Pi co(tB) = t Pi co(B), so t is the gauge of Pi K's vertices with
    respect to Pi co(B).
    """
    from .measures import orientation_measure

    PiB = projection_body(orientation_measure(B))
    PiK = projection_body(blaschke_measure(K))
    return float(np.max(PiK.vertices @ PiB.normals.T / PiB.offsets))


def random_weak_barrier(K: Polytope, k: int | None = None, rng=None,
                        slack: tuple[float, float] = (1.0, 1.5)) -> Barrier:
    """Random segment set scaled until it is a weak barrier of K, times a slack factor."""
    rng = _rng(rng)
    k = k or int(rng.integers(2, 8))
    while True:
        B = random_segments(k, rng)
        if np.linalg.matrix_rank(B.segment_vectors, tol=1e-6) == 2:
            break
    t = weak_barrier_scale(B, K) * rng.uniform(*slack)
    return B.scale(t)
