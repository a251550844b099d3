"""Polytope geometry in the plane and in space.

Convex polytopes are stored by their vertices; facet data (outer unit
normals, support offsets, facet areas) and edge data are derived lazily
through Qhull.  Everything works at a fixed absolute tolerance of 1e-9,
which assumes bodies of roughly unit size.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import ConvexHull
from scipy.special import gamma

from .errors import DegenerateError

TOL = 1e-9


def kappa(n: int) -> float:
    """Volume of the n-dimensional unit ball (kappa_0 = 1)."""
    return math.pi ** (n / 2) / gamma(n / 2 + 1)


def omega(n: int) -> float:
    """Surface area of the unit sphere in R^n."""
    return n * kappa(n)


def as_direction(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(norm < 1e-15):
        raise DegenerateError("zero vector cannot be normalized to a direction")
    return v / norm


def random_directions(k: int, n: int, rng=None) -> np.ndarray:
    rng = np.random.default_rng(rng)
    return as_direction(rng.standard_normal((k, n)))


def rot90(v) -> np.ndarray:
    """Counter-clockwise quarter turn of planar vectors."""
    v = np.asarray(v, dtype=float)
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def _merge_points(points: np.ndarray, tol: float = TOL) -> np.ndarray:
    # rounding groups almost all duplicates; Qhull absorbs the rest
    if len(points) == 0:
        return points
    key = np.round(points / tol).astype(np.int64)
    _, idx = np.unique(key, axis=0, return_index=True)
    return points[np.sort(idx)]


class Polytope:
    """Convex hull of a finite point set in R^2 or R^3.

    Lower-dimensional hulls are allowed but flagged through
    :attr:`is_degenerate`; for those only :meth:`support` and
    :meth:`mean_width` are meaningful.
    """

    def __init__(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] not in (2, 3):
            raise ValueError("only dimensions 2 and 3 are supported")
        self._points = points

    @classmethod
    def from_json(cls, data: dict) -> "Polytope":
        poly = cls(data["vertices"])
        if "dim" in data and int(data["dim"]) != poly.dim:
            raise ValueError("dim field does not match vertex coordinates")
        return poly

    def to_json(self) -> dict:
        return {"dim": self.dim, "vertices": self.vertices.tolist()}

    def __repr__(self):
        kind = "degenerate " if self.is_degenerate else ""
        return f"<{kind}Polytope dim={self.dim} vertices={len(self.vertices)}>"

    @property
    def dim(self) -> int:
        return self._points.shape[1]

    @cached_property
    def affine_dim(self) -> int:
        pts = self._points
        if len(pts) < 2:
            return 0
        s = np.linalg.svd(pts - pts.mean(axis=0), compute_uv=False)
        return int(np.sum(s > TOL))

    @property
    def is_degenerate(self) -> bool:
        return self.affine_dim < self.dim

    @cached_property
    def _hull(self) -> dict:
        pts = _merge_points(self._points)
        if self.is_degenerate:
            return self._degenerate_hull(pts)
        if self.dim == 2:
            return self._hull_2d(pts)
        return self._hull_3d(pts)

    def _degenerate_hull(self, pts):
        c = pts.mean(axis=0)
        _, s, vt = np.linalg.svd(pts - c, full_matrices=False)
        k = self.affine_dim
        if k == 0:
            verts = c[None, :]
            boundary = 0.0
        elif k == 1:
            t = (pts - c) @ vt[0]
            verts = pts[[np.argmin(t), np.argmax(t)]]
            boundary = 2 * float(t.max() - t.min())
        else:
            # planar polygon sitting in R^3
            coords = (pts - c) @ vt[:2].T
            hull = ConvexHull(coords)
            verts = pts[hull.vertices]
            boundary = float(hull.area)
        return {"vertices": verts, "normals": np.zeros((0, self.dim)),
                "offsets": np.zeros(0), "areas": np.zeros(0),
                "edge_lengths": np.zeros(0), "edge_angles": np.zeros(0),
                "relative_boundary": boundary}

    def _hull_2d(self, pts):
        hull = ConvexHull(pts)
        verts = pts[hull.vertices]  # counter-clockwise
        # drop vertices in the relative interior of an edge
        prev = np.roll(verts, 1, axis=0)
        nxt = np.roll(verts, -1, axis=0)
        a, b = verts - prev, nxt - verts
        turn = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
        verts = verts[turn > TOL * np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1) + 1e-15]
        edges = np.roll(verts, -1, axis=0) - verts
        lengths = np.linalg.norm(edges, axis=1)
        normals = -rot90(edges) / lengths[:, None]
        offsets = np.einsum("ij,ij->i", normals, verts)
        return {"vertices": verts, "normals": normals, "offsets": offsets,
                "areas": lengths, "edge_lengths": np.zeros(0),
                "edge_angles": np.zeros(0)}

    def _hull_3d(self, pts):
        hull = ConvexHull(pts)
        simp, eqs, nb = hull.simplices, hull.equations, hull.neighbors
        nt = len(simp)
        tri = pts[simp]
        tri_area = 0.5 * np.linalg.norm(
            np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0]), axis=1)
        tri_normal = eqs[:, :3]

        # coplanar neighbouring triangles form one facet
        t1 = np.repeat(np.arange(nt), 3)
        t2 = nb.ravel()
        same = np.linalg.norm(tri_normal[t1] - tri_normal[t2], axis=1) < TOL
        graph = coo_matrix((np.ones(same.sum()), (t1[same], t2[same])), shape=(nt, nt))
        nfacets, label = connected_components(graph, directed=False)

        areas = np.bincount(label, weights=tri_area, minlength=nfacets)
        nsum = np.zeros((nfacets, 3))
        np.add.at(nsum, label, tri_normal * tri_area[:, None])
        normals = nsum / np.linalg.norm(nsum, axis=1, keepdims=True)
        verts = pts[np.unique(simp)]
        offsets = np.max(normals @ verts.T, axis=1)

        # edges: triangle sides shared by two different facets
        opp = np.tile(np.arange(3), nt)
        keep = (label[t1] != label[t2]) & (t1 < t2)
        s1 = simp[t1[keep]]
        o = opp[keep]
        ends = np.stack([s1[np.arange(len(o)), (o + 1) % 3],
                         s1[np.arange(len(o)), (o + 2) % 3]], axis=1)
        lengths = np.linalg.norm(pts[ends[:, 0]] - pts[ends[:, 1]], axis=1)
        cosang = np.einsum("ij,ij->i", normals[label[t1[keep]]], normals[label[t2[keep]]])
        angles = np.arccos(np.clip(cosang, -1.0, 1.0))
        return {"vertices": verts, "normals": normals, "offsets": offsets,
                "areas": areas, "edge_lengths": lengths, "edge_angles": angles}

    @property
    def vertices(self) -> np.ndarray:
        return self._hull["vertices"]

    @property
    def normals(self) -> np.ndarray:
        return self._hull["normals"]

    @property
    def offsets(self) -> np.ndarray:
        return self._hull["offsets"]

    @property
    def areas(self) -> np.ndarray:
        """Facet areas (edge lengths in the plane)."""
        return self._hull["areas"]

    def support(self, u) -> np.ndarray | float:
        """Support function h(P, u) = max over vertices of <u, x>.

        ``u`` may be a single direction or an array of directions.
        """
        u = np.asarray(u, dtype=float)
        vals = np.max(u.reshape(-1, self.dim) @ self.vertices.T, axis=1)
        return float(vals[0]) if u.ndim == 1 else vals

    def width(self, u):
        u = np.asarray(u, dtype=float)
        return self.support(u) + self.support(-u)

    def _require_full(self, what):
        if self.is_degenerate:
            raise DegenerateError(f"{what} needs a full-dimensional polytope")

    def volume(self) -> float:
        self._require_full("volume")
        c = self.vertices.mean(axis=0)
        heights = self.offsets - self.normals @ c
        return float(np.sum(heights * self.areas) / self.dim)

    def surface_area(self) -> float:
        if self.is_degenerate:
            # a flat body counted from both sides, matching S*(K) = S(K)
            if self.dim == 3 and self.affine_dim == 2:
                return 2 * self._flat_area()
            return self._hull["relative_boundary"] if self.dim == 2 else 0.0
        return float(np.sum(self.areas))

    def _flat_area(self) -> float:
        pts = self.vertices
        c = pts.mean(axis=0)
        _, _, vt = np.linalg.svd(pts - c)
        return float(ConvexHull((pts - c) @ vt[:2].T).volume)

    def perimeter(self) -> float:
        if self.dim != 2:
            raise ValueError("perimeter is defined for planar polygons only")
        return self.surface_area()

    def mean_width(self) -> float:
        """Mean width, exact for polytopes.

        Plane: boundary length / pi.  Space: (1/4pi) * sum over edges of
        length times exterior dihedral angle.
        """
        if self.dim == 2:
            if self.is_degenerate:
                return self._hull["relative_boundary"] / math.pi
            return self.perimeter() / math.pi
        if self.is_degenerate:
            k = self.affine_dim
            if k == 0:
                return 0.0
            if k == 1:
                # flat edge with exterior angle 2 pi
                return self._hull["relative_boundary"] / 4
            return self._hull["relative_boundary"] / 4
        h = self._hull
        return float(np.sum(h["edge_lengths"] * h["edge_angles"]) / (4 * math.pi))

    def contains(self, points, tol: float = TOL) -> np.ndarray:
        self._require_full("containment")
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return np.all(points @ self.normals.T <= self.offsets + tol, axis=1)

    def containment_margin(self, points) -> tuple[float, int, int]:
        """Smallest slack h_i - <x, u_i> over facets and points.

        Returns the slack together with the facet and point index where it
        occurs; negative slack means some point lies outside.
        """
        self._require_full("containment")
        points = np.atleast_2d(np.asarray(points, dtype=float))
        slack = self.offsets[:, None] - self.normals @ points.T
        i, j = np.unravel_index(np.argmin(slack), slack.shape)
        return float(slack[i, j]), int(i), int(j)

    def contains_polytope(self, other: "Polytope", tol: float = TOL) -> bool:
        return bool(np.all(self.contains(other.vertices, tol)))

    def translate(self, t) -> "Polytope":
        return Polytope(self.vertices + np.asarray(t, dtype=float))

    def scale(self, s: float) -> "Polytope":
        return Polytope(s * self.vertices)

    def reflect(self) -> "Polytope":
        return Polytope(-self.vertices)

    def is_origin_symmetric(self, tol: float = 1e-8) -> bool:
        dirs = np.vstack([self.normals, -self.normals]) if len(self.normals) else None
        if dirs is None:
            return bool(np.allclose(self.vertices.mean(axis=0), 0, atol=tol))
        return bool(np.allclose(self.support(dirs), self.reflect().support(dirs), atol=tol))

    def inball(self) -> tuple[float, np.ndarray]:
        """Largest inscribed ball by linear programming: (radius, center)."""
        self._require_full("inradius")
        n = self.dim
        A = np.hstack([self.normals, np.ones((len(self.normals), 1))])
        c = np.zeros(n + 1)
        c[-1] = -1.0
        res = linprog(c, A_ub=A, b_ub=self.offsets,
                      bounds=[(None, None)] * n + [(0, None)], method="highs")
        if res.status != 0:
            raise DegenerateError(f"inradius LP failed: {res.message}")
        return float(res.x[-1]), res.x[:n]

    def inradius(self) -> float:
        return self.inball()[0]

    def circumradius(self) -> float:
        """Max vertex distance from the inball center."""
        _, center = self.inball()
        return float(np.max(np.linalg.norm(self.vertices - center, axis=1)))

    def max_vertex_norm(self) -> float:
        return float(np.max(np.linalg.norm(self.vertices, axis=1)))


def support(P: Polytope, u):
    return P.support(u)


def volume(P: Polytope) -> float:
    return P.volume()


def surface_area(P: Polytope) -> float:
    return P.surface_area()


def mean_width(P: Polytope) -> float:
    return P.mean_width()


def inradius(P: Polytope) -> float:
    return P.inradius()


def circumradius(P: Polytope) -> float:
    return P.circumradius()


class Zonotope(Polytope):
    """Origin-symmetric zonotope 1/2 * sum_j [-g_j, g_j].

    The support function is evaluated exactly from the generators; the
    vertex description is only built when something asks for it.
    """

    def __init__(self, generators, dim: int | None = None):
        G = np.atleast_2d(np.asarray(generators, dtype=float))
        if dim is not None and G.shape[1] != dim:
            raise ValueError("generator length does not match dim")
        G = G[np.linalg.norm(G, axis=1) >= 1e-12]
        d = dim if dim is not None else G.shape[1]
        if len(G) == 0 or np.linalg.matrix_rank(G, tol=1e-12) < d:
            raise DegenerateError("generators span fewer than dim dimensions")
        self.generators = G
        self._dim = d

    @property
    def dim(self) -> int:
        return self._dim

    @cached_property
    def _points(self):
        if self._dim == 2:
            return _zonogon_vertices(self.generators)
        return _zonotope_vertices_3d(self.generators)

    @property
    def affine_dim(self) -> int:
        return self._dim

    def support(self, u):
        u = np.asarray(u, dtype=float)
        vals = 0.5 * np.sum(np.abs(u.reshape(-1, self._dim) @ self.generators.T), axis=1)
        return float(vals[0]) if u.ndim == 1 else vals

    def max_vertex_norm(self) -> float:
        return float(np.max(np.linalg.norm(self.vertices, axis=1)))

    def __repr__(self):
        return f"<Zonotope dim={self._dim} generators={len(self.generators)}>"


def _zonogon_vertices(G: np.ndarray) -> np.ndarray:
    G = G.copy()
    ang = np.arctan2(G[:, 1], G[:, 0])
    flip = (ang < 0) | (ang >= math.pi)
    G[flip] *= -1
    G = G[np.argsort(np.arctan2(G[:, 1], G[:, 0]), kind="stable")]
    start = -0.5 * G.sum(axis=0)
    steps = np.vstack([G, -G])
    return start + np.vstack([np.zeros(2), np.cumsum(steps, axis=0)[:-1]])


def _zonotope_vertices_3d(G: np.ndarray, chunk: int = 4096) -> np.ndarray:
    """Exact vertex set: union of the vertices of all zonotope facets.

    Each facet normal is the cross product of two non-parallel generators;
    the facet is a translate of the zonogon spanned by the generators
    lying in that plane.
    """
    m = len(G)
    gnorm = np.linalg.norm(G, axis=1)
    i, j = np.triu_indices(m, 1)
    N = np.cross(G[i], G[j])
    nn = np.linalg.norm(N, axis=1)
    ok = nn > 1e-10 * gnorm[i] * gnorm[j]
    N = N[ok] / nn[ok, None]
    # one normal per plane, sign-canonical
    lead = np.argmax(np.abs(N) > 1e-12, axis=1)
    N *= np.sign(N[np.arange(len(N)), lead])[:, None]
    N = _merge_points(N, 1e-9)

    out = []
    for start in range(0, len(N), chunk):
        block = N[start:start + chunk]
        D = block @ G.T
        coplanar = np.abs(D) <= 1e-9 * gnorm[None, :]
        sgn = np.where(coplanar, 0.0, np.sign(D))
        centers = 0.5 * sgn @ G
        ncop = coplanar.sum(axis=1)
        generic = ncop == 2
        if np.any(generic):
            idx = np.nonzero(coplanar[generic])[1].reshape(-1, 2)
            ga, gb = 0.5 * G[idx[:, 0]], 0.5 * G[idx[:, 1]]
            c = centers[generic]
            for sa in (-1, 1):
                for sb in (-1, 1):
                    off = sa * ga + sb * gb
                    out.append(c + off)
                    out.append(-c + off)
        for k in np.nonzero(~generic)[0]:
            gc = G[coplanar[k]]
            n = block[k]
            e1 = as_direction(gc[0])
            e2 = np.cross(n, e1)
            poly2 = _zonogon_vertices(np.stack([gc @ e1, gc @ e2], axis=1))
            off = poly2[:, :1] * e1 + poly2[:, 1:] * e2
            out.append(centers[k] + off)
            out.append(-centers[k] + off)
    return _merge_points(np.vstack(out))


def zonotope(generators, dim: int | None = None) -> Zonotope:
    """Origin-symmetric zonotope with support 1/2 sum_j |<u, g_j>|."""
    return Zonotope(generators, dim)


def minkowski_sum_2d(P: Polytope, Q: Polytope) -> Polytope:
    """Minkowski sum of two convex polygons by merging edge sequences."""
    if P.dim != 2 or Q.dim != 2:
        raise ValueError("minkowski_sum_2d expects planar polytopes")
    if P.is_degenerate or Q.is_degenerate:
        # points and segments: hull of pairwise sums is cheap and exact
        pts = (P.vertices[:, None, :] + Q.vertices[None, :, :]).reshape(-1, 2)
        return Polytope(pts)

    def from_bottom(V):
        k = np.lexsort((V[:, 0], V[:, 1]))[0]
        return np.roll(V, -k, axis=0)

    A, B = from_bottom(P.vertices), from_bottom(Q.vertices)
    ea = np.roll(A, -1, axis=0) - A
    eb = np.roll(B, -1, axis=0) - B
    angle = lambda e: np.mod(np.arctan2(e[:, 1], e[:, 0]), 2 * math.pi)
    aa, ab = angle(ea), angle(eb)
    out = [A[0] + B[0]]
    i = j = 0
    while i < len(A) or j < len(B):
        if j >= len(B) or (i < len(A) and aa[i] <= ab[j]):
            step = ea[i]
            i += 1
        else:
            step = eb[j]
            j += 1
        out.append(out[-1] + step)
    return Polytope(np.array(out[:-1]))


def central_symmetral_2d(P: Polytope) -> Polytope:
    """1/2 (P + (-P)); the Blaschke body of a planar body."""
    S = minkowski_sum_2d(P, P.reflect())
    return S.scale(0.5)


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")

    @property
    def dim(self) -> int:
        return len(self.center)

    def support(self, u):
        u = np.asarray(u, dtype=float)
        return u @ self.center + self.radius * np.linalg.norm(u, axis=-1)

    def polytope(self, level: int = 3, m: int = 64) -> Polytope:
        """Inscribed polytopal approximation (icosphere or regular m-gon)."""
        if self.dim == 2:
            t = 2 * math.pi * np.arange(m) / m
            pts = np.stack([np.cos(t), np.sin(t)], axis=1)
        else:
            pts, _ = icosphere(level)
        return Polytope(self.center + self.radius * pts)

    def to_json(self) -> dict:
        return {"center": self.center.tolist(), "radius": float(self.radius)}

    @classmethod
    def from_json(cls, data: dict) -> "Ball":
        return cls(np.asarray(data["center"], dtype=float), float(data["radius"]))


def icosphere(level: int) -> tuple[np.ndarray, np.ndarray]:
    """Subdivided icosahedron on the unit sphere: (vertices, faces).

    Level L has 20 * 4**L triangles and is centrally symmetric.
    """
    p = (1 + math.sqrt(5)) / 2
    verts = [(-1, p, 0), (1, p, 0), (-1, -p, 0), (1, -p, 0),
             (0, -1, p), (0, 1, p), (0, -1, -p), (0, 1, -p),
             (p, 0, -1), (p, 0, 1), (-p, 0, -1), (-p, 0, 1)]
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
             (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
             (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
             (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    V = [np.array(v, dtype=float) / np.linalg.norm(v) for v in verts]
    F = np.array(faces)
    for _ in range(level):
        cache = {}

        def mid(a, b):
            key = (min(a, b), max(a, b))
            if key not in cache:
                m = V[a] + V[b]
                V.append(m / np.linalg.norm(m))
                cache[key] = len(V) - 1
            return cache[key]

        new = []
        for a, b, c in F:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        F = np.array(new)
    return np.array(V), F


def icosphere_polytope(level: int = 3, radius: float = 1.0) -> Polytope:
    return Polytope(radius * icosphere(level)[0])


def spherical_triangle_areas(V: np.ndarray, F: np.ndarray) -> np.ndarray:
    """Solid angles of geodesic triangles (Van Oosterom-Strackee)."""
    a, b, c = V[F[:, 0]], V[F[:, 1]], V[F[:, 2]]
    num = np.abs(np.einsum("ij,ij->i", a, np.cross(b, c)))
    den = 1 + np.einsum("ij,ij->i", a, b) + np.einsum("ij,ij->i", b, c) \
        + np.einsum("ij,ij->i", c, a)
    return 2 * np.arctan2(num, den)


def covering_radius(V: np.ndarray, F: np.ndarray) -> float:
    """Chordal distance within which every sphere point has a net vertex.

    Each geodesic triangle lies in the cap cut off by the plane through
    its corners, so no point is farther from its nearest corner than the
    cap's chordal radius.
    """
    a, b, c = V[F[:, 0]], V[F[:, 1]], V[F[:, 2]]
    n = as_direction(np.cross(b - a, c - a))
    n *= np.sign(np.einsum("ij,ij->i", n, a))[:, None]
    return float(np.max(np.linalg.norm(n - a, axis=1)))


def circle_directions(k: int) -> np.ndarray:
    t = 2 * math.pi * np.arange(k) / k
    return np.stack([np.cos(t), np.sin(t)], axis=1)


# ball radii attached to a body; used to bound constants in the
# stability estimates
def outer_radius_from_width(w: float, n: int) -> float:
    """K containing o lies in R0 B^n with R0 = omega_n / (2 kappa_{n-1}) w(K)."""
    return omega(n) / (2 * kappa(n - 1)) * w


def outer_radius_from_inball(r: float, surface: float, n: int) -> float:
    """K containing r B^n lies in R0 B^n, R0 = 2^{n-1} S(dK) / (kappa_{n-2} r^{n-2})."""
    return 2 ** (n - 1) * surface / (kappa(n - 2) * r ** (n - 2))


def radii_from_projection_body(r: float, R: float, n: int) -> tuple[float, float]:
    """Ball sandwich of K from r B^n in Pi K in R B^n (K origin-symmetric)."""
    R0 = omega(n) / r * (R / kappa(n - 1)) ** (n / (n - 1))
    r0 = r / (2 ** (n - 1) * R0 ** (n - 2))
    return r0, R0


def ball_bounds(P: Polytope, clause: str = "i") -> tuple[float, float]:
    """Inner and outer radii (r0, R0) from one of three ball bounds.

    ``"i"`` needs o in P, ``"ii"`` uses the inball (P is recentred on its
    inball center by the caller), ``"iii"`` needs P origin-symmetric.
    A radius the clause says nothing about is returned as 0.
    """
    n = P.dim
    if clause == "i":
        return 0.0, outer_radius_from_width(P.mean_width(), n)
    if clause == "ii":
        r = P.inradius()
        return r, outer_radius_from_inball(r, P.surface_area(), n)
    if clause == "iii":
        from .measures import blaschke_measure, projection_body
        PK = projection_body(blaschke_measure(P))
        return radii_from_projection_body(PK.inradius(), PK.max_vertex_norm(), n)
    raise ValueError(f"unknown clause {clause!r}")
