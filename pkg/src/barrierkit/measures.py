"""Finite measures on the unit sphere and piecewise-linear barriers.

A :class:`DirectionalMeasure` is a finite sum of weighted Dirac atoms.
It holds surface area measures of polytopes, orientation measures of
barriers, and Minkowski data in general.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DegenerateError
from .geometry import TOL, Polytope, Zonotope, as_direction, kappa, omega, rot90


def _cluster(points: np.ndarray, tol: float) -> np.ndarray:
    """Label points so that points closer than ``tol`` share a label."""
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components
    from scipy.spatial import cKDTree

    pairs = cKDTree(points).query_pairs(tol, output_type="ndarray")
    n = len(points)
    if len(pairs) == 0:
        return np.arange(n)
    g = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    return connected_components(g, directed=False)[1]


class DirectionalMeasure:
    """Weighted atoms (u_j, w_j) on S^{n-1}, w_j > 0.

    Atoms closer than ``tol`` are merged by adding their weights.  When
    ``even`` is None the symmetry is detected; passing ``even=True`` for
    data that is not antipodally balanced raises ``ValueError``.
    """

    def __init__(self, directions, weights, even: bool | None = None, tol: float = TOL):
        U = np.atleast_2d(np.asarray(directions, dtype=float))
        w = np.asarray(weights, dtype=float).ravel()
        if len(U) != len(w):
            raise ValueError("directions and weights differ in length")
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        keep = w > 0
        U, w = U[keep], w[keep]
        if len(U):
            # leave unit vectors bit-identical so files round-trip exactly
            norms = np.linalg.norm(U, axis=1)
            if np.any(norms == 0):
                raise ValueError("zero direction vector")
            U = np.where(np.abs(norms - 1)[:, None] < 1e-15, U, U / norms[:, None])
        self.dim = U.shape[1]
        if len(U):
            label = _cluster(U, tol)
            k = label.max() + 1
            W = np.bincount(label, weights=w, minlength=k)
            size = np.bincount(label, minlength=k)
            S = np.zeros((k, self.dim))
            np.add.at(S, label, U * w[:, None])
            S = as_direction(S)
            single = size[label] == 1
            S[label[single]] = U[single]
            U, w = S, W
        self.directions = U
        self.weights = w
        self._tol = tol
        detected = self._check_even()
        if even and not detected:
            raise ValueError("measure flagged even but atoms are not antipodally balanced")
        self.even = detected if even is None else bool(even)

    def _check_even(self) -> bool:
        if len(self.weights) == 0:
            return True
        from scipy.spatial import cKDTree

        dist, idx = cKDTree(self.directions).query(-self.directions)
        return bool(np.all(dist < self._tol)
                    and np.allclose(self.weights[idx], self.weights, rtol=0, atol=TOL * max(1.0, self.weights.max())))

    def __len__(self):
        return len(self.weights)

    def __repr__(self):
        return f"<DirectionalMeasure dim={self.dim} atoms={len(self)} mass={self.mass:.6g} even={self.even}>"

    @property
    def mass(self) -> float:
        return float(np.sum(self.weights))

    def reflect(self) -> "DirectionalMeasure":
        return DirectionalMeasure(-self.directions, self.weights, tol=self._tol)

    def __add__(self, other: "DirectionalMeasure") -> "DirectionalMeasure":
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return DirectionalMeasure(np.vstack([self.directions, other.directions]),
                                  np.concatenate([self.weights, other.weights]), tol=self._tol)

    def __mul__(self, s: float) -> "DirectionalMeasure":
        return DirectionalMeasure(self.directions, s * self.weights, tol=self._tol)

    __rmul__ = __mul__

    def mass_of(self, mask_fn) -> float:
        return float(np.sum(self.weights[mask_fn(self.directions)]))

    def integrate(self, f) -> float:
        return float(np.sum(self.weights * f(self.directions)))

    def pair_representatives(self) -> tuple[np.ndarray, np.ndarray]:
        """One direction per antipodal pair with the pair's total weight."""
        if not self.even:
            raise ValueError("antipodal pairing needs an even measure")
        from scipy.spatial import cKDTree

        _, partner = cKDTree(self.directions).query(-self.directions)
        first = np.arange(len(self)) < partner
        return self.directions[first], self.weights[first] + self.weights[partner[first]]

    def same_as(self, other: "DirectionalMeasure", tol: float = 1e-9) -> bool:
        """Atom lists coincide after merging (up to ``tol`` in weight)."""
        if len(self) != len(other) or self.dim != other.dim:
            return False
        from scipy.spatial import cKDTree

        dist, idx = cKDTree(other.directions).query(self.directions)
        return bool(np.all(dist < self._tol) and np.all(np.abs(other.weights[idx] - self.weights) <= tol))

    def to_json(self) -> dict:
        return {"dim": self.dim, "even": self.even,
                "atoms": [{"u": u.tolist(), "w": float(w)} for u, w in zip(self.directions, self.weights)]}

    @classmethod
    def from_json(cls, data: dict) -> "DirectionalMeasure":
        atoms = data["atoms"]
        dim = int(data["dim"])
        U = np.array([a["u"] for a in atoms], dtype=float).reshape(-1, dim)
        w = np.array([a["w"] for a in atoms], dtype=float)
        return cls(U, w, even=data.get("even"))


class Barrier:
    """Finite union of segments (plane) or triangles (space)."""

    def __init__(self, pieces):
        P = np.asarray(pieces, dtype=float)
        if P.ndim != 3 or P.shape[2] not in (2, 3) or P.shape[1] != P.shape[2]:
            raise ValueError("pieces must be segments (k,2,2) or triangles (k,3,3)")
        self.pieces = P
        if np.any(self.piece_measures <= 1e-12):
            raise DegenerateError("barrier contains a piece of zero length/area")

    @property
    def dim(self) -> int:
        return self.pieces.shape[2]

    def __len__(self):
        return len(self.pieces)

    def __repr__(self):
        return f"<Barrier dim={self.dim} pieces={len(self)} S={self.surface_area():.6g}>"

    @cached_property
    def _derived(self):
        P = self.pieces
        if self.dim == 2:
            d = P[:, 1] - P[:, 0]
            m = np.linalg.norm(d, axis=1)
            return m, rot90(d) / np.where(m > 0, m, 1)[:, None]
        c = np.cross(P[:, 1] - P[:, 0], P[:, 2] - P[:, 0])
        m = np.linalg.norm(c, axis=1)
        return 0.5 * m, c / np.where(m > 0, m, 1)[:, None]

    @property
    def piece_measures(self) -> np.ndarray:
        """Segment lengths or triangle areas."""
        return self._derived[0]

    @property
    def normals(self) -> np.ndarray:
        return self._derived[1]

    @property
    def segment_vectors(self) -> np.ndarray:
        if self.dim != 2:
            raise ValueError("segment vectors exist for planar barriers only")
        return self.pieces[:, 1] - self.pieces[:, 0]

    def surface_area(self) -> float:
        return float(np.sum(self.piece_measures))

    length = surface_area

    def translate_piece(self, k: int, t) -> "Barrier":
        P = self.pieces.copy()
        P[k] += np.asarray(t, dtype=float)
        return Barrier(P)

    def scale(self, s: float) -> "Barrier":
        return Barrier(s * self.pieces)

    def __add__(self, other: "Barrier") -> "Barrier":
        return Barrier(np.concatenate([self.pieces, other.pieces]))

    @classmethod
    def from_polytope_boundary(cls, P: Polytope, scale: float = 1.0) -> "Barrier":
        """The boundary of P (optionally scaled about the origin) as a barrier."""
        if P.dim == 2:
            V = P.vertices
            return cls(scale * np.stack([V, np.roll(V, -1, axis=0)], axis=1))
        from scipy.spatial import ConvexHull

        hull = ConvexHull(P.vertices)
        return cls(scale * P.vertices[hull.simplices])

    def to_json(self) -> dict:
        key = "segments" if self.dim == 2 else "triangles"
        return {"dim": self.dim, key: self.pieces.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "Barrier":
        pieces = data.get("segments", data.get("triangles"))
        if pieces is None:
            raise ValueError("barrier JSON needs 'segments' or 'triangles'")
        B = cls(pieces)
        if "dim" in data and int(data["dim"]) != B.dim:
            raise ValueError("dim field does not match piece coordinates")
        return B


def orientation_measure(B: Barrier) -> DirectionalMeasure:
    """S*(B, .): each piece puts its measure on both unit normals."""
    m, v = B.piece_measures, B.normals
    return DirectionalMeasure(np.vstack([v, -v]), np.concatenate([m, m]), even=True)


def surface_area_measure(P: Polytope) -> DirectionalMeasure:
    if P.is_degenerate:
        raise DegenerateError("surface area measure needs a full-dimensional polytope")
    return DirectionalMeasure(P.normals, P.areas)


@dataclass
class MinkowskiDataReport:
    ok: bool
    centroid_norm: float
    min_singular_value: float
    failures: list[str] = field(default_factory=list)


def validate_minkowski_data(mu: DirectionalMeasure) -> MinkowskiDataReport:
    """Check the centroid condition and full span of the atoms."""
    failures = []
    total = mu.mass
    if total <= 0:
        return MinkowskiDataReport(False, 0.0, 0.0, ["empty measure"])
    centroid = float(np.linalg.norm(mu.weights @ mu.directions))
    if centroid > 1e-8 * total:
        failures.append(f"centroid condition: |sum w u| = {centroid:.3g} != 0")
    rows = np.sqrt(mu.weights / total)[:, None] * mu.directions
    s = np.linalg.svd(rows, compute_uv=False)
    smin = float(s[-1]) if len(s) == mu.dim else 0.0
    if smin <= 1e-8:
        failures.append("concentrated on a great subsphere")
    return MinkowskiDataReport(not failures, centroid, smin, failures)


def blaschke_measure(P: Polytope) -> DirectionalMeasure:
    """S(nabla P, .) = 1/2 (S(P, .) + S(-P, .))."""
    S = surface_area_measure(P)
    return DirectionalMeasure(np.vstack([S.directions, -S.directions]),
                              0.5 * np.concatenate([S.weights, S.weights]), even=True)


def projection_function(mu: DirectionalMeasure, u) -> np.ndarray | float:
    """1/2 sum_j w_j |<u, u_j>|; projection area when mu = S(K, .)."""
    u = np.asarray(u, dtype=float)
    vals = 0.5 * np.abs(u.reshape(-1, mu.dim) @ mu.directions.T) @ mu.weights
    return float(vals[0]) if u.ndim == 1 else vals


def projection_body(mu: DirectionalMeasure) -> Zonotope:
    """Zonotope whose support function is the projection function of mu."""
    if not mu.even:
        raise ValueError("projection_body expects an even measure; pass the Blaschke measure")
    U, w = mu.pair_representatives()
    if len(U) == 0:
        raise DegenerateError("empty measure")
    return Zonotope(w[:, None] * U, mu.dim)


def mean_width_projection_identity(mu: DirectionalMeasure) -> tuple[float, float]:
    """Both sides of w(Pi K) = (2 kappa_{n-1} / omega_n) S(dK).

    The left side comes from the polytope geometry of the projection body;
    the right side from the total mass of mu read as a surface area measure.
    """
    report = validate_minkowski_data(mu)
    if not report.ok:
        raise DegenerateError("; ".join(report.failures))
    n = mu.dim
    lhs = projection_body(mu).mean_width()
    rhs = 2 * kappa(n - 1) / omega(n) * mu.mass
    return lhs, rhs
