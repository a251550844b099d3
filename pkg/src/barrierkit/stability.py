"""Distances between directional measures and the stability estimates.

The bounded-Lipschitz distance between two atomic measures is computed
exactly by a linear program over the union of their supports.  Values
of an admissible test function on finitely many points extend to the
whole sphere with the same sup-norm and Lipschitz constant (McShane
extension followed by clamping), so nothing is lost by discretising.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog
from scipy.spatial.distance import pdist

from .analysis import Verdict, is_weak_barrier, jones_deficit
from .errors import ContainmentError
from .geometry import (TOL, Polytope, as_direction, circle_directions, icosphere, kappa, omega,
                       spherical_triangle_areas)
from .measures import (Barrier, DirectionalMeasure, _cluster, blaschke_measure,
                       orientation_measure)

BETA_GRID = (math.pi / 64, math.pi / 32, math.pi / 16, math.pi / 8, 3 * math.pi / 16,
             math.pi / 4 - math.pi / 64)


def _common_support(mu: DirectionalMeasure, nu: DirectionalMeasure):
    U = np.vstack([mu.directions, nu.directions])
    label = _cluster(U, TOL)
    k = label.max() + 1 if len(label) else 0
    diff = np.bincount(label, weights=np.concatenate([mu.weights, -nu.weights]), minlength=k)
    pts = np.zeros((k, U.shape[1]))
    pts[label] = U
    return pts, diff


def dbl(mu: DirectionalMeasure, nu: DirectionalMeasure) -> float:
    """Bounded-Lipschitz distance sup { int f d(mu - nu) : |f|_inf + Lip(f) <= 1 }.

    LP variables: f_1..f_m on the common support, a bound a on |f| and a
    Lipschitz constant L with a + L <= 1.
    """
    if mu.dim != nu.dim:
        raise ValueError("measures live on spheres of different dimension")
    pts, diff = _common_support(mu, nu)
    m = len(diff)
    if m == 0 or np.all(diff == 0):
        return 0.0
    # variables: f (m), a, L
    nv = m + 2
    rows, rhs = [], []

    def row(entries):
        r = np.zeros(nv)
        for j, v in entries:
            r[j] += v
        return r

    rows.append(row([(m, 1.0), (m + 1, 1.0)]))
    rhs.append(1.0)
    for j in range(m):
        rows.append(row([(j, 1.0), (m, -1.0)]))
        rows.append(row([(j, -1.0), (m, -1.0)]))
        rhs += [0.0, 0.0]
    d = pdist(pts)
    i, j = np.triu_indices(m, 1)
    A = np.vstack(rows)
    b = np.array(rhs)
    if m > 1:
        P = np.zeros((2 * len(d), nv))
        r = np.arange(len(d))
        P[r, i], P[r, j], P[r, m + 1] = 1.0, -1.0, -d
        P[len(d) + r, i], P[len(d) + r, j], P[len(d) + r, m + 1] = -1.0, 1.0, -d
        A = np.vstack([A, P])
        b = np.concatenate([b, np.zeros(2 * len(d))])
    c = np.concatenate([-diff, [0.0, 0.0]])
    bounds = [(None, None)] * m + [(0, None), (0, None)]
    res = linprog(c, A_ub=A, b_ub=b, bounds=bounds, method="highs",
                  options={"primal_feasibility_tolerance": 1e-10,
                           "dual_feasibility_tolerance": 1e-10})
    if res.status != 0:
        raise RuntimeError(f"bounded-Lipschitz LP failed: {res.message}")
    return max(0.0, float(-res.fun))


@dataclass
class LevyProkhorovBound:
    value: float
    applicable: bool
    reason: str = ""


def dlp_upper_bound(mu: DirectionalMeasure, nu: DirectionalMeasure,
                    d: float | None = None) -> LevyProkhorovBound:
    """(1 + sqrt(3 + mu(S))) * dbl^(1/2), valid when dbl <= 1 and mu != 0."""
    d = dbl(mu, nu) if d is None else d
    value = (1 + math.sqrt(3 + mu.mass)) * math.sqrt(d)
    if mu.mass <= 0:
        return LevyProkhorovBound(value, False, "mu has zero mass")
    if d > 1:
        return LevyProkhorovBound(value, False, f"dbl = {d:.6g} exceeds 1")
    return LevyProkhorovBound(value, True)


def normal_set(K: Polytope) -> np.ndarray:
    """Facet normals of K together with their antipodes."""
    return DirectionalMeasure(np.vstack([K.normals, -K.normals]),
                              np.ones(2 * len(K.normals))).directions


def _check_antipodal(V: np.ndarray):
    from scipy.spatial import cKDTree

    dist, _ = cKDTree(V).query(-V)
    if np.any(dist > 1e-9):
        raise ValueError("direction set V must be closed under antipodes")


def jbeta_mask(V: np.ndarray, beta: float, u) -> np.ndarray:
    """u lies at angle > beta from every direction of V."""
    u = np.atleast_2d(np.asarray(u, dtype=float))
    ang = np.arccos(np.clip(u @ np.asarray(V).T, -1, 1))
    return np.all(ang > beta, axis=1)


def jbeta_mass(m: DirectionalMeasure, V, beta: float) -> float:
    """Mass of m on J_beta = {u : angle(u, v) > beta for all v in V}."""
    V = as_direction(V)
    if not 0 < beta < math.pi / 4:
        raise ValueError("beta must lie in (0, pi/4)")
    _check_antipodal(V)
    return float(np.sum(m.weights[jbeta_mask(V, beta, m.directions)]))


def corollary_witness_function(V, beta: float, u) -> np.ndarray | float:
    """f(u) = 1 - max_i (<v_i, u> - cos beta)^+ / (1 - cos beta).

    Vanishes on V, equals one on J_beta; |f|_inf <= 1 and Lip(f) <= 1/(1 - cos beta).
    """
    V = as_direction(V)
    u = np.asarray(u, dtype=float)
    cb = math.cos(beta)
    g = np.clip(np.atleast_2d(u) @ V.T - cb, 0, None) / (1 - cb)
    f = 1 - g.max(axis=1)
    return float(f[0]) if u.ndim == 1 else f


def stability_exponent(n: int, eps: float = 0.0) -> float:
    """2(n+1) / (n^2 (n+4)) - eps."""
    return float(Fraction(2 * (n + 1), n * n * (n + 4))) - eps


@dataclass
class StabilityReport:
    dim: int
    deficit: float
    dbl: float
    exponent: float
    ratio: float
    equality_case: bool
    inradius: float
    surface_B: float
    surface_K: float
    dlp_bound: LevyProkhorovBound
    beta_table: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"dim": self.dim, "deficit": self.deficit, "dbl": self.dbl,
                "exponent": self.exponent,
                "ratio": None if math.isnan(self.ratio) else
                ("inf" if math.isinf(self.ratio) else self.ratio),
                "equality_case": self.equality_case, "inradius": self.inradius,
                "surface_B": self.surface_B, "surface_K": self.surface_K,
                "dlp_bound": {"value": self.dlp_bound.value,
                              "applicable": self.dlp_bound.applicable},
                "beta_table": self.beta_table}

    def beta_csv(self) -> str:
        buf = io.StringIO()
        cols = ["beta", "jbeta_mass", "steiner_bound", "chain_bound"]
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in self.beta_table:
            w.writerow({k: repr(float(r[k])) for k in cols})
        return buf.getvalue()


class NotWeakBarrierError(ValueError):
    pass


def stability_report(B: Barrier, K: Polytope, eps: float = 0.0,
                     betas=BETA_GRID) -> StabilityReport:
    """Both sides of the stability estimates for a weak barrier B of K.

    The constant in the power-law bound is not known, so the report
    exposes dbl / deficit^exponent instead of asserting the bound.
    """
    verdict = is_weak_barrier(B, K)
    if verdict.verdict is not Verdict.TRUE:
        raise NotWeakBarrierError(f"B is not certified as a weak barrier ({verdict.verdict.value})")
    n = K.dim
    delta = jones_deficit(B, K)
    S_B = orientation_measure(B)
    S_nabla = blaschke_measure(K)
    d = dbl(S_nabla, S_B)
    e = stability_exponent(n, eps)
    equality = abs(delta) < TOL and d < TOL
    if equality:
        ratio = math.nan
    elif delta <= 0:
        ratio = math.inf
    else:
        ratio = d / delta ** e
    V = normal_set(K)
    table = []
    for beta in betas:
        scale = 2 / (1 - math.cos(beta))
        table.append({"beta": beta, "jbeta_mass": jbeta_mass(S_B, V, beta),
                      "steiner_bound": scale * max(delta, 0.0), "chain_bound": scale * d})
    return StabilityReport(n, delta, d, e, ratio, equality, K.inradius(), B.surface_area(),
                           K.surface_area(), dlp_upper_bound(S_nabla, S_B, d), table)


# --- support-function distances between nested bodies ---------------------

def sup_distance_constant(n: int) -> float:
    """Constant c_n from the cap-integration argument (c_2 = pi / sqrt 2)."""
    if n == 2:
        return math.pi / math.sqrt(2)
    cL_per_w = omega(n) / (2 * kappa(n - 1))
    return float((n * omega(n) / kappa(n - 1)) ** (1 / n) * 2 ** ((1 - 5 / n) / 2)
        * cL_per_w ** (1 - 1 / n))


def _candidate_directions(Kp: Polytope, K: Polytope, level: int = 5) -> np.ndarray:
    n = K.dim
    net = circle_directions(2048) if n == 2 else icosphere(level)[0]
    diffs = (K.vertices[:, None, :] - Kp.vertices[None, :, :]).reshape(-1, n)
    diffs = diffs[np.linalg.norm(diffs, axis=1) > 1e-12]
    parts = [net, K.normals, Kp.normals, as_direction(K.vertices), as_direction(Kp.vertices)]
    if len(diffs):
        parts.append(as_direction(diffs))
    return np.vstack(parts)


def _check_nested(Kp: Polytope, K: Polytope):
    if Kp.dim != K.dim:
        raise ValueError("bodies of different dimension")
    if not K.contains_polytope(Kp, tol=1e-9):
        raise ContainmentError("K' is not contained in K")
    for P in (Kp, K):
        if not P.is_origin_symmetric():
            raise ValueError("bodies must be origin-symmetric")


def hausdorff_support(Kp: Polytope, K: Polytope, level: int = 5) -> float:
    """delta_inf(K', K) = max_u (h_K - h_K') for K' inside K.

    Candidates: a direction net, all facet normals, vertex directions and
    directions of vertex differences.  In the plane the last group makes
    the maximum exact.
    """
    U = _candidate_directions(Kp, K, level)
    return float(np.max(K.support(U) - Kp.support(U)))


def l2_support(Kp: Polytope, K: Polytope, level: int = 5) -> float:
    """delta_2(K', K) by quadrature: trapezoid on 2048 angles (plane),
    midpoint rule on a level-``level`` icosphere (space)."""
    if K.dim == 2:
        U = circle_directions(2048)
        f = K.support(U) - Kp.support(U)
        return math.sqrt(float(np.sum(f ** 2)) * 2 * math.pi / len(U))
    V, F = icosphere(level)
    w = spherical_triangle_areas(V, F)
    c = as_direction(V[F].mean(axis=1))
    f = K.support(c) - Kp.support(c)
    return math.sqrt(float(np.sum(w * f ** 2)))


@dataclass
class InequalityCheck:
    lhs: float
    rhs: float
    ok: bool
    details: dict = field(default_factory=dict)


QUADRATURE_RTOL = 1e-4


def lemma1_check(Kp: Polytope, K: Polytope) -> InequalityCheck:
    """delta_inf(K', K) <= c_n w(K)^(1-1/n) (w(K) - w(K'))^(1/n)."""
    _check_nested(Kp, K)
    n = K.dim
    w, wp = K.mean_width(), Kp.mean_width()
    dw = max(w - wp, 0.0)
    lhs = hausdorff_support(Kp, K)
    rhs = sup_distance_constant(n) * w ** (1 - 1 / n) * dw ** (1 / n)
    return InequalityCheck(lhs, rhs, bool(lhs <= rhs * (1 + QUADRATURE_RTOL) + 1e-12),
                           {"w": w, "w_inner": wp, "c_n": sup_distance_constant(n)})


def lemma3_check(Kp: Polytope, K: Polytope) -> InequalityCheck:
    """delta_2(K', K) <= (omega_n c_n / 2) w(K)^(1-1/n) (w(K) - w(K'))^(1+1/n).

    ``details["rhs_sqrt"]`` holds the square root of the same right-hand
    side, the bound that follows from delta_2^2 <= delta_inf * delta_1.
    """
    _check_nested(Kp, K)
    n = K.dim
    w, wp = K.mean_width(), Kp.mean_width()
    dw = max(w - wp, 0.0)
    lhs = l2_support(Kp, K)
    rhs = float(omega(n)) * sup_distance_constant(n) / 2 * w ** (1 - 1 / n) * dw ** (1 + 1 / n)
    rhs_sqrt = math.sqrt(rhs)
    return InequalityCheck(lhs, rhs, bool(lhs <= rhs * (1 + QUADRATURE_RTOL) + 1e-12),
                           {"w": w, "w_inner": wp, "rhs_sqrt": rhs_sqrt,
                            "ok_sqrt": bool(lhs <= rhs_sqrt * (1 + QUADRATURE_RTOL) + 1e-12)})
