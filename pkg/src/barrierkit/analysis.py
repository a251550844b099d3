"""Weak and strong barrier tests, Jones deficits, and the cylinder example.

A set B is a weak barrier for K when its projection onto every
hyperplane u^perp, counted with multiplicity, has at least the area of
K's projection.  In terms of measures this reads

    1/2 int |<u,v>| S*(B, dv)  >=  1/2 int |<u,v>| S(K, dv)   for all u,

i.e. Pi K is contained in Pi co(B).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binomtest

from .convexification import convexify_2d
from .errors import DegenerateError
from .geometry import (TOL, Polytope, Zonotope, as_direction, central_symmetral_2d,
                       covering_radius, icosphere, rot90)
from .measures import (Barrier, DirectionalMeasure, blaschke_measure, orientation_measure,
                       projection_body, projection_function, surface_area_measure)


class Verdict(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNDECIDED = "undecided"


@dataclass
class CertifiedBool:
    """Three-valued answer with the evidence behind it.

    ``margin`` is the certified slack for TRUE and the (negative)
    violation at ``witness`` for FALSE.
    """

    verdict: Verdict
    margin: float
    witness: np.ndarray | None = None
    net_level: int | None = None
    resolution: float | None = None

    def __bool__(self):
        return self.verdict is Verdict.TRUE

    def to_json(self) -> dict:
        return {"verdict": self.verdict.value, "margin": self.margin,
                "witness": None if self.witness is None else self.witness.tolist(),
                "net_level": self.net_level, "resolution": self.resolution}


def multiplicity_projection_area(B: Barrier, u) -> np.ndarray | float:
    """Area of the projection of B onto u^perp, counted with multiplicity."""
    u = np.asarray(u, dtype=float)
    vals = np.abs(u.reshape(-1, B.dim) @ B.normals.T) @ B.piece_measures
    return float(vals[0]) if u.ndim == 1 else vals


def _polygon_containment(inner: Polytope, outer: Polytope) -> CertifiedBool:
    """Exact vertex-in-halfplane test; the witness is the violated normal."""
    if outer.is_degenerate:
        if inner.is_degenerate and inner.affine_dim <= outer.affine_dim:
            raise DegenerateError("containment of two degenerate bodies is not decided here")
        # a segment or point cannot contain a full-dimensional body
        V = outer.vertices
        d = V[-1] - V[0] if len(V) > 1 else np.array([1.0, 0.0])
        u = as_direction(rot90(d))
        if inner.support(-u) > inner.support(u):
            u = -u
        return CertifiedBool(Verdict.FALSE, float(outer.support(u) - inner.support(u)), u)
    slack, i, _ = outer.containment_margin(inner.vertices)
    if slack >= -TOL:
        return CertifiedBool(Verdict.TRUE, slack)
    return CertifiedBool(Verdict.FALSE, slack, outer.normals[i].copy())


def _dominates(mu: DirectionalMeasure, nu: DirectionalMeasure, tol: float = TOL) -> bool:
    """mu >= nu as measures (every atom of nu is covered by mu)."""
    from scipy.spatial import cKDTree

    dist, idx = cKDTree(mu.directions).query(nu.directions)
    return bool(np.all(dist < tol) and np.all(mu.weights[idx] >= nu.weights - tol))


def weak_barrier_gap(B: Barrier, K: Polytope, u) -> np.ndarray | float:
    """h(Pi co B, u) - h(Pi K, u); non-negative everywhere iff weak barrier."""
    return projection_function(orientation_measure(B), u) - \
        projection_function(surface_area_measure(K), u)


def is_weak_barrier(B: Barrier, K: Polytope, level: int = 4, max_level: int = 7) -> CertifiedBool:
    """Decide whether Pi K lies in Pi co(B).

    Plane: exact polygon containment of the two projection bodies.  Space:
    the gap g(u) is evaluated on an icosphere net; if its minimum beats
    the Lipschitz constant times the net's covering radius the answer is
    certified TRUE, any negative value is a FALSE witness, otherwise the
    net is refined up to ``max_level`` before giving up.
    """
    if B.dim != K.dim:
        raise ValueError("barrier and body live in different dimensions")
    if K.is_degenerate:
        raise DegenerateError("K must be full-dimensional")
    if K.dim == 2:
        PiK = projection_body(blaschke_measure(K))
        mu = orientation_measure(B)
        U, w = mu.pair_representatives()
        if np.linalg.matrix_rank(U, tol=1e-12) < 2:
            # all segments parallel: Pi co(B) is a segment
            u = as_direction(rot90(U[0]))
            return CertifiedBool(Verdict.FALSE, float(weak_barrier_gap(B, K, u)), u)
        return _polygon_containment(PiK, projection_body(mu))

    mu_B = orientation_measure(B)
    mu_K = surface_area_measure(K)
    if _dominates(mu_B, blaschke_measure(K)):
        # S*(B) >= S(nabla K) atom by atom, so the gap is a positive combination
        return CertifiedBool(Verdict.TRUE, 0.0)
    for lev in range(level, max_level + 1):
        V, F = icosphere(lev)
        delta = covering_radius(V, F)
        hB = projection_function(mu_B, V)
        hK = projection_function(mu_K, V)
        g = hB - hK
        k = int(np.argmin(g))
        if g[k] < -TOL:
            return CertifiedBool(Verdict.FALSE, float(g[k]), V[k].copy(), lev, delta)
        # support functions are Lipschitz with constant = circumradius,
        # and R <= max_net(h) / (1 - delta) for a net of radius delta
        RB = min(hB.max() / (1 - delta), 0.5 * mu_B.mass)
        RK = min(hK.max() / (1 - delta), 0.5 * mu_K.mass)
        certified = float(g[k] - (RB + RK) * delta)
        if certified >= -TOL:
            return CertifiedBool(Verdict.TRUE, certified, None, lev, delta)
    return CertifiedBool(Verdict.UNDECIDED, certified, None, max_level, delta)


def is_weak_barrier_2d_prop1(B: Barrier, K: Polytope) -> CertifiedBool:
    """Plane only: weak barrier iff the central symmetral of K lies in co(B)."""
    if B.dim != 2 or K.dim != 2:
        raise ValueError("planar barrier and body expected")
    if K.is_degenerate:
        raise DegenerateError("K must be full-dimensional")
    nablaK = central_symmetral_2d(K)
    d = B.segment_vectors
    if np.linalg.matrix_rank(d, tol=1e-12) < 2:
        u = as_direction(rot90(d[0]))
        return CertifiedBool(Verdict.FALSE, float(-nablaK.support(u)), u)
    return _polygon_containment(nablaK, convexify_2d(B))


def jones_deficit(B: Barrier, K: Polytope) -> float:
    """S(B) - S(dK) / 2."""
    return B.surface_area() - 0.5 * K.surface_area()


# --- line sampling ---------------------------------------------------------

@dataclass
class StrongBarrierEstimate:
    miss_fraction: float
    ci95: tuple[float, float]
    lines: int
    misses: int
    seed: int
    mean_multiplicity: float

    def to_json(self) -> dict:
        return {"miss_fraction": self.miss_fraction, "ci95": list(self.ci95),
                "lines": self.lines, "misses": self.misses, "seed": self.seed,
                "mean_multiplicity": self.mean_multiplicity}


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    # counter-based stream per chunk: results do not depend on scheduling
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, chunk])))


def _perp_basis(u: np.ndarray) -> np.ndarray:
    """Orthonormal basis of u^perp for each row of u, shape (k, n-1, n)."""
    if u.shape[1] == 2:
        return rot90(u)[:, None, :]
    a = np.where(np.abs(u[:, :1]) < 0.9, np.array([[1.0, 0, 0]]), np.array([[0, 1.0, 0]]))
    e1 = as_direction(np.cross(u, a))
    e2 = np.cross(u, e1)
    return np.stack([e1, e2], axis=1)


def _line_hits_body(K: Polytope, x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Does x + R u meet K?  Intersect the facet constraints along the line."""
    a = u @ K.normals.T  # (k, m)
    b = K.offsets[None, :] - x @ K.normals.T
    with np.errstate(divide="ignore", invalid="ignore"):
        r = b / a
    lo = np.where(a < -1e-15, r, -np.inf).max(axis=1)
    hi = np.where(a > 1e-15, r, np.inf).min(axis=1)
    parallel_ok = np.all((np.abs(a) > 1e-15) | (b >= 0), axis=1)
    return (lo <= hi) & parallel_ok


def _line_hits_pieces(B: Barrier, x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Number of pieces of B met by each line x + R u."""
    step = max(1, 2_000_000 // (len(B) * B.dim ** 2))
    if len(x) > step:
        return np.concatenate([_line_hits_pieces(B, x[i:i + step], u[i:i + step])
                               for i in range(0, len(x), step)])
    P = B.pieces  # (m, n, n)
    if B.dim == 2:
        nrm = rot90(u)  # (k, 2)
        s0 = np.einsum("kd,md->km", nrm, P[:, 0]) - np.sum(nrm * x, axis=1)[:, None]
        s1 = np.einsum("kd,md->km", nrm, P[:, 1]) - np.sum(nrm * x, axis=1)[:, None]
        return np.sum(s0 * s1 <= 0, axis=1)
    # line through x with direction u meets triangle abc iff the three
    # triple products <u, (p - x) x (q - x)> around the triangle share a sign
    rel = P[None, :, :, :] - x[:, None, None, :]  # (k, m, 3, 3)
    uu = u[:, None, :]
    s = [np.einsum("kmd,kmd->km", np.broadcast_to(uu, rel[:, :, 0].shape),
                   np.cross(rel[:, :, i], rel[:, :, (i + 1) % 3])) for i in range(3)]
    s = np.stack(s, axis=-1)
    return np.sum(np.all(s >= 0, axis=-1) | np.all(s <= 0, axis=-1), axis=1)


def sample_lines(K: Polytope, N: int, seed: int = 0, chunk_size: int = 20000):
    """Lines meeting K: direction uniform on the sphere, foot point uniform
    in the projection K|u^perp (rejection from its bounding box).

    Yields (x, u) arrays chunk by chunk.
    """
    n = K.dim
    done = 0
    chunk = 0
    while done < N:
        k = min(chunk_size, N - done)
        rng = _chunk_rng(seed, chunk)
        xs, us = [], []
        got = 0
        while got < k:
            u = as_direction(rng.standard_normal((k, n)))
            E = _perp_basis(u)  # (k, n-1, n)
            proj = np.einsum("kjd,vd->kjv", E, K.vertices)
            lo, hi = proj.min(axis=2), proj.max(axis=2)
            t = lo + rng.random(lo.shape) * (hi - lo)
            x = np.einsum("kj,kjd->kd", t, E)
            ok = _line_hits_body(K, x, u) if n == 3 else np.ones(k, dtype=bool)
            xs.append(x[ok])
            us.append(u[ok])
            got += int(ok.sum())
        xs = np.concatenate(xs)[:k]
        us = np.concatenate(us)[:k]
        yield xs, us
        done += k
        chunk += 1


def strong_barrier_mc(B: Barrier, K: Polytope, N: int = 100_000, seed: int = 0) -> StrongBarrierEstimate:
    """Fraction of random lines through K that miss B, with a 95% interval."""
    if N < 1:
        raise ValueError("need at least one line")
    if K.is_degenerate:
        raise DegenerateError("K must be full-dimensional")
    misses = 0
    mult = 0
    for x, u in sample_lines(K, N, seed):
        hits = _line_hits_pieces(B, x, u)
        misses += int(np.sum(hits == 0))
        mult += int(np.sum(hits))
    ci = binomtest(misses, N).proportion_ci(confidence_level=0.95)
    return StrongBarrierEstimate(misses / N, (float(ci.low), float(ci.high)), N, misses,
                                 int(seed), mult / N)


def mc_multiplicity_area(B: Barrier, u, N: int = 100_000, seed: int = 0) -> tuple[float, float]:
    """Monte Carlo estimate of the multiplicity projection area along u.

    Foot points are uniform in a box of u^perp covering B's projection;
    returns (estimate, standard error).
    """
    u = as_direction(u)
    E = _perp_basis(u[None, :])[0]
    proj = np.einsum("jd,mvd->mvj", E, B.pieces).reshape(-1, B.dim - 1)
    lo, hi = proj.min(axis=0) - 1e-6, proj.max(axis=0) + 1e-6
    area = float(np.prod(hi - lo))
    rng = _chunk_rng(seed, 0)
    counts = []
    for start in range(0, N, 20000):
        k = min(20000, N - start)
        t = lo + rng.random((k, B.dim - 1)) * (hi - lo)
        x = t @ E
        counts.append(_line_hits_pieces(B, x, np.broadcast_to(u, x.shape).copy()))
    c = np.concatenate(counts).astype(float)
    return float(c.mean() * area), float(c.std(ddof=1) / math.sqrt(N) * area)


# --- the cylinder example --------------------------------------------------

def cylinder(s: float, radius: float, m: int = 64) -> Polytope:
    """Prism over a regular m-gon, axis e3, centered at the origin."""
    t = 2 * math.pi * np.arange(m) / m
    ring = np.stack([radius * np.cos(t), radius * np.sin(t)], axis=1)
    top = np.hstack([ring, np.full((m, 1), s / 2)])
    bottom = np.hstack([ring, np.full((m, 1), -s / 2)])
    return Polytope(np.vstack([top, bottom]))


@dataclass
class CylinderReport:
    s: float
    projection_inclusion: CertifiedBool
    blaschke_contained: bool
    violating_vertex: np.ndarray
    violation: float
    max_projection_area: float
    projection_area_bound: float
    ball_projection_area: float
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return (self.projection_inclusion.verdict is Verdict.TRUE and not self.blaschke_contained
                and self.max_projection_area <= self.projection_area_bound < 2 * math.pi)

    def to_json(self) -> dict:
        return {"s": self.s, "projection_inclusion": self.projection_inclusion.to_json(),
                "blaschke_contained": self.blaschke_contained,
                "violating_vertex": self.violating_vertex.tolist(), "violation": self.violation,
                "max_projection_area": self.max_projection_area,
                "projection_area_bound": self.projection_area_bound,
                "ball_projection_area": self.ball_projection_area, "ok": self.ok}


def cylinder_counterexample(s: float, icosphere_level: int = 3, m: int = 64,
                            net_level: int = 4) -> CylinderReport:
    """Weak barrier in R^3 whose convexification does not contain nabla K.

    co(B) is the icosphere approximation of the unit ball, realised by the
    barrier B = boundary of (icosphere / sqrt 2); K is a thin symmetric
    cylinder of length s and radius 1/(2s).
    """
    if not s > 2:
        raise ValueError("the construction needs a cylinder of length s > 2")
    K = cylinder(s, 1 / (2 * s), m)
    ball = Polytope(icosphere(icosphere_level)[0])
    B = Barrier.from_polytope_boundary(ball, scale=1 / math.sqrt(2))

    inclusion = is_weak_barrier(B, K, level=net_level)
    # K is origin-symmetric, so nabla K = K
    slack, _, j = ball.containment_margin(K.vertices)
    PiK = projection_body(blaschke_measure(K))
    max_area = PiK.max_vertex_norm()
    PiBall = projection_body(surface_area_measure(ball))
    V, _ = icosphere(net_level)
    return CylinderReport(
        s=s,
        projection_inclusion=inclusion,
        blaschke_contained=slack >= -TOL,
        violating_vertex=K.vertices[j].copy(),
        violation=-slack,
        max_projection_area=max_area,
        projection_area_bound=1 + 1 / s ** 2,
        ball_projection_area=float(np.min(PiBall.support(V))),
        details={"barrier_area": B.surface_area(), "K_surface": K.surface_area()},
    )
