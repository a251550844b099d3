"""JSON files for bodies, measures and barriers, and SVG pictures of planar setups.

Floats are written with ``repr``, which round-trips doubles exactly;
keys are sorted so equal objects produce identical files.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import DegenerateError, FormatError
from .geometry import Ball, Polytope
from .measures import Barrier, DirectionalMeasure


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(data) -> str:
    if hasattr(data, "to_json"):
        data = data.to_json()
    return json.dumps(data, sort_keys=True, indent=2, default=_plain)


def dump(data, path) -> None:
    Path(path).write_text(dumps(data) + "\n")


def _read(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise FormatError(f"{path}: top-level JSON object expected")
    return data


def parse(data: dict):
    """Build the object a JSON dict describes, judged by its keys."""
    try:
        if "vertices" in data:
            P = Polytope.from_json(data)
            if "dim" in data and int(data["dim"]) != P.dim:
                raise FormatError("dim field does not match vertex coordinates")
            return P
        if "center" in data and "radius" in data:
            return Ball.from_json(data)
        if "atoms" in data:
            return DirectionalMeasure.from_json(data)
        if "segments" in data or "triangles" in data:
            return Barrier.from_json(data)
    except (FormatError, DegenerateError):
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(str(exc)) from exc
    raise FormatError("unrecognised object: expected vertices, center/radius, atoms, segments or triangles")


def load(path, kind: type | tuple | None = None):
    obj = parse(_read(path))
    if kind is not None and not isinstance(obj, kind):
        raise FormatError(f"{path}: got {type(obj).__name__}, expected {kind}")
    return obj


def load_barrier(path) -> Barrier:
    return load(path, Barrier)


def load_body(path) -> Polytope:
    obj = load(path, (Polytope, Ball))
    return obj.polytope() if isinstance(obj, Ball) else obj


# --- SVG ---------------------------------------------------------------------

def render_svg(barrier: Barrier | None = None, body: Polytope | None = None,
               hull: Polytope | None = None, size: int = 480) -> str:
    """Planar picture: body outlined, barrier stroked, convexification in bold."""
    pts = []
    if body is not None:
        pts.append(body.vertices)
    if barrier is not None:
        if barrier.dim != 2:
            raise ValueError("SVG rendering is planar only")
        pts.append(barrier.pieces.reshape(-1, 2))
    if hull is not None:
        pts.append(hull.vertices)
    if not pts:
        raise ValueError("nothing to draw")
    allp = np.vstack(pts)
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    span = float(max(hi - lo)) or 1.0
    lo = lo - 0.05 * span
    span *= 1.1
    scale = size / span

    def xy(p):
        # flip y so the picture has the usual orientation
        return (p[0] - lo[0]) * scale, size - (p[1] - lo[1]) * scale

    def polygon(P, style):
        pts = " ".join("%.3f,%.3f" % xy(v) for v in P.vertices)
        return f'<polygon points="{pts}" {style}/>'

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">']
    if body is not None:
        parts.append(polygon(body, 'fill="none" stroke="#888" stroke-width="1.5"'))
    if hull is not None:
        parts.append(polygon(hull, 'fill="none" stroke="#000" stroke-width="3"'))
    if barrier is not None:
        for a, b in barrier.pieces:
            (x1, y1), (x2, y2) = xy(a), xy(b)
            parts.append(f'<line x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" y2="{y2:.3f}" '
                         'stroke="#c22" stroke-width="2"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
