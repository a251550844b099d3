"""Built-in scenarios with their expected outcomes."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .analysis import Verdict, cylinder_counterexample, is_weak_barrier, jones_deficit
from .geometry import Polytope
from .measures import Barrier, blaschke_measure, orientation_measure
from .stability import dbl

# Steiner point of the corners (0,0), (1,0), (0,1): all angles 120 degrees
STEINER_S = 0.5 - math.sqrt(3) / 6


def unit_square() -> Polytope:
    """[-1/2, 1/2]^2."""
    return Polytope([[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]])


def steiner_barrier() -> Barrier:
    """Shortest known barrier of the unit square, centered at the origin.

    A Steiner tree on three corners plus the half-diagonal from the fourth
    corner towards the center.
    """
    s = [STEINER_S, STEINER_S]
    segs = [[[0, 0], s], [[1, 0], s], [[0, 1], s], [[1, 1], [0.5, 0.5]]]
    return Barrier(np.asarray(segs, dtype=float) - 0.5)


def half_boundary(K: Polytope) -> Barrier:
    """1/2 dK as a barrier (boundary of K scaled by 1/2)."""
    return Barrier.from_polytope_boundary(K, scale=0.5)


@dataclass
class Check:
    name: str
    value: float | bool
    expected: float | bool
    tol: float = 0.0

    @property
    def passed(self) -> bool:
        if isinstance(self.expected, bool):
            return bool(self.value) is self.expected
        return abs(float(self.value) - float(self.expected)) <= self.tol

    def to_json(self) -> dict:
        v = self.value if isinstance(self.value, bool) else float(self.value)
        return {"name": self.name, "value": v, "expected": self.expected,
                "tol": self.tol, "passed": self.passed}


@dataclass
class Scenario:
    name: str
    description: str
    run: Callable[[], tuple[dict, list[Check]]]


@dataclass
class ScenarioResult:
    name: str
    checks: list[Check]
    outputs: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {"scenario": self.name, "passed": self.passed, "seconds": self.seconds,
                "checks": [c.to_json() for c in self.checks], "outputs": self.outputs}


def _square_steiner():
    B, Q = steiner_barrier(), unit_square()
    verdict = is_weak_barrier(B, Q)
    length = B.length()
    delta = jones_deficit(B, Q)
    checks = [Check("length", length, 2.639, 1e-3),
              Check("weak_barrier", verdict.verdict is Verdict.TRUE, True),
              Check("deficit", delta, 0.639, 1e-3)]
    return {"length": length, "deficit": delta, "weak": verdict.to_json()}, checks


def _half_boundary():
    Q = unit_square()
    B = half_boundary(Q)
    delta = jones_deficit(B, Q)
    d = dbl(blaschke_measure(Q), orientation_measure(B))
    checks = [Check("deficit", delta, 0.0, 1e-9), Check("dbl", d, 0.0, 1e-9),
              Check("weak_barrier", bool(is_weak_barrier(B, Q)), True)]
    return {"deficit": delta, "dbl": d}, checks


def _cylinder_3d():
    rep = cylinder_counterexample(3.0)
    checks = [Check("projection_inclusion", rep.projection_inclusion.verdict is Verdict.TRUE, True),
              Check("blaschke_contained", rep.blaschke_contained, False),
              Check("projection_area_bound",
                    rep.max_projection_area <= rep.projection_area_bound < 2 * math.pi, True)]
    return rep.to_json(), checks


SCENARIOS = {
    "square-steiner": Scenario("square-steiner", "Steiner barrier of the unit square", _square_steiner),
    "half-boundary": Scenario("half-boundary", "half of the square's boundary, Jones equality",
                              _half_boundary),
    "cylinder-3d": Scenario("cylinder-3d", "thin cylinder inside the ball's weak-barrier class",
                            _cylinder_3d),
}


def run_scenario(name: str) -> ScenarioResult:
    if name not in SCENARIOS:
        raise KeyError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}")
    t = time.perf_counter()
    outputs, checks = SCENARIOS[name].run()
    return ScenarioResult(name, checks, outputs, time.perf_counter() - t)
