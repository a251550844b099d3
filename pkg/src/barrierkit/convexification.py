"""Convexification co(B): the origin-symmetric body with S(co B, .) = S*(B, .).

In the plane co(B) is the zonogon of the segment vectors.  In space it is
obtained by solving the even Minkowski problem for the orientation
measure with a damped Newton method.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import DegenerateError, InvalidDataError, NotConvergedError
from .geometry import Polytope, Zonotope, omega
from .measures import Barrier, DirectionalMeasure, orientation_measure, validate_minkowski_data

log = logging.getLogger(__name__)


def convexify_2d(B: Barrier) -> Zonotope:
    """1/2 sum_k [-d_k, d_k] over the segment vectors d_k."""
    if B.dim != 2:
        raise ValueError("convexify_2d expects a planar barrier")
    return Zonotope(B.segment_vectors, 2)


@dataclass
class MinkowskiSolution:
    polytope: Polytope
    target: DirectionalMeasure
    residual: float
    iterations: int
    support_numbers: np.ndarray
    vanished: list[int] = field(default_factory=list)
    history: list[tuple[int, float]] = field(default_factory=list)


class _Cell:
    """Geometry of P(h) = {x : <x, u_j> <= h_j} for an origin-symmetric h.

    Built from the polar body conv{u_j / h_j}: its facets give the
    vertices of P(h), its edges the edges of P(h).
    """

    def __init__(self, U: np.ndarray, h: np.ndarray):
        m = len(U)
        hull = ConvexHull(U / h[:, None])
        simp, eqs, nb = hull.simplices, hull.equations, hull.neighbors
        verts = eqs[:, :3] / -eqs[:, 3:4]
        t1 = np.repeat(np.arange(len(simp)), 3)
        t2 = nb.ravel()
        opp = np.tile(np.arange(3), len(simp))
        keep = t1 < t2
        s = simp[t1[keep]]
        o = opp[keep]
        r = np.arange(len(o))
        j, k = s[r, (o + 1) % 3], s[r, (o + 2) % 3]
        ell = np.linalg.norm(verts[t1[keep]] - verts[t2[keep]], axis=1)
        cos = np.clip(np.einsum("ij,ij->i", U[j], U[k]), -1, 1)
        sin = np.sqrt(1 - cos ** 2)
        H = np.zeros((m, m))
        a = ell / sin
        np.add.at(H, (j, k), a)
        np.add.at(H, (k, j), a)
        d = np.zeros(m)
        np.add.at(d, j, -ell * cos / sin)
        np.add.at(d, k, -ell * cos / sin)
        H[np.diag_indices(m)] = d
        self.hessian = H  # d A_j / d h_k
        self.areas = 0.5 * H @ h  # degree-2 homogeneity
        self.volume = float(h @ self.areas / 3)
        self.vertices = verts
        self.present = np.zeros(m, dtype=bool)
        self.present[hull.vertices] = True


def _facet_geometry(U, h):
    try:
        return _Cell(U, h)
    except QhullError:
        return None


def solve_minkowski(mu: DirectionalMeasure, tol: float = 1e-6, max_iter: int = 500,
                    h0=None) -> MinkowskiSolution:
    """Origin-symmetric polytope in R^3 whose facet areas match mu.

    Minimises the convex functional sum_j w_j h_j - log V(h) over support
    numbers h (one per antipodal pair); at the minimum the facet areas are
    proportional to w, and a final dilation makes them equal.  ``tol`` is
    the admissible max relative facet-area error.
    """
    if mu.dim != 3:
        raise InvalidDataError("solve_minkowski handles dimension 3 only")
    report = validate_minkowski_data(mu)
    if not report.ok:
        raise InvalidDataError("; ".join(report.failures))
    if not mu.even:
        raise InvalidDataError("only even Minkowski data is supported")

    Up, wpair = mu.pair_representatives()
    wp = wpair / 2  # weight of each of the two atoms
    p = len(Up)
    U = np.vstack([Up, -Up])

    if h0 is None:
        h = np.full(p, (mu.mass / omega(3)) ** 0.5)
    else:
        h = np.asarray(h0, dtype=float).copy()
    # psi(t h) is minimised over t > 0 where sum_j w_j h_j = 3
    normalize = lambda hp: hp * (3 / (2 * wp @ hp))

    def evaluate(hp):
        cell = _facet_geometry(U, np.concatenate([hp, hp]))
        if cell is None or cell.volume <= 0:
            return None, math.inf
        return cell, float(2 * wp @ hp - math.log(cell.volume))

    h = normalize(h)
    cell, psi = evaluate(h)
    if cell is None:
        raise InvalidDataError("initial support numbers do not give a body")
    history = []
    best = None
    for it in range(1, max_iter + 1):
        A = cell.areas[:p]
        V = cell.volume
        resid = float(np.max(np.abs(A / (V * wp) - 1)))
        history.append((it, resid))
        log.debug("iteration %d residual %.3e", it, resid)
        if best is None or resid < best[0]:
            best = (resid, h.copy())
        if resid < tol * 1e-3:
            break

        on = cell.present[:p]
        if not np.all(on):
            # a vanished facet does not shape P(h); make it tangent
            h = h.copy()
            h[~on] = np.max(cell.vertices @ Up[~on].T, axis=0)
            psi = float(2 * wp @ h - math.log(V))

        grad = 2 * wp - 2 * A / V
        HV = cell.hessian
        hess = -(HV[:p, :p] + HV[:p, p:] + HV[p:, :p] + HV[p:, p:]) / V \
            + np.outer(2 * A, 2 * A) / V ** 2
        hess = 0.5 * (hess + hess.T)
        step = np.zeros(p)
        sub = hess[np.ix_(on, on)]
        try:
            L = np.linalg.cholesky(sub + 1e-14 * np.trace(sub) / on.sum() * np.eye(on.sum()))
            step[on] = -np.linalg.solve(L.T, np.linalg.solve(L, grad[on]))
        except np.linalg.LinAlgError:
            step[on] = -np.linalg.lstsq(sub, grad[on], rcond=None)[0]
        # cutting into the body brings a vanished facet back
        step[~on] = -0.1 * h[~on]
        decrement = float(-grad @ step)
        if decrement <= 0:
            step = -grad * np.min(h) / (np.linalg.norm(grad) + 1e-300)
            decrement = float(-grad @ step)

        # no support number moves by more than half its value per step
        t = min(1.0, 0.5 * float(np.min(h / (np.abs(step) + 1e-300))))
        while True:
            trial = normalize(h + t * step)
            new_cell, new_psi = evaluate(trial)
            if new_cell is not None and new_psi <= psi - 1e-4 * t * decrement + 1e-14 * abs(psi):
                break
            if t < 1e-12:
                break
            t *= 0.5
        if new_cell is None or t < 1e-12:
            log.debug("line search stalled at iteration %d", it)
            break
        h, cell, psi = trial, new_cell, new_psi

    # rescale so that areas match exactly
    h_best = best[1]
    cell = _facet_geometry(U, np.concatenate([h_best, h_best]))
    h_final = h_best / math.sqrt(cell.volume)
    cell = _facet_geometry(U, np.concatenate([h_final, h_final]))
    A = cell.areas[:p]
    residual = float(np.max(np.abs(A - wp) / wp))
    vanished = [int(i) for i in np.nonzero(A < 1e-10 * np.mean(A))[0]]
    poly = Polytope(cell.vertices)
    sol = MinkowskiSolution(poly, mu, residual, len(history),
                            np.concatenate([h_final, h_final]), vanished, history)
    if residual > tol:
        raise NotConvergedError(
            f"Minkowski solver stopped at residual {residual:.3e} after {len(history)} iterations", sol)
    return sol


def convexify(B: Barrier, tol: float = 1e-6, max_iter: int = 500) -> Polytope:
    """co(B) in the plane or in space."""
    if B.dim == 2:
        return convexify_2d(B)
    mu = orientation_measure(B)
    report = validate_minkowski_data(mu)
    if not report.ok:
        raise DegenerateError("; ".join(report.failures))
    return solve_minkowski(mu, tol=tol, max_iter=max_iter).polytope
