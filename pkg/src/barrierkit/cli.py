"""Command-line front end.

Exit codes: 0 success / true, 1 false or failed check, 2 unreadable
input, 3 degenerate data, 4 solver did not converge, 5 undecided.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import io
from .analysis import Verdict, is_weak_barrier, strong_barrier_mc
from .convexification import convexify_2d, solve_minkowski
from .errors import DegenerateError, FormatError, InvalidDataError, NotConvergedError
from .measures import orientation_measure, validate_minkowski_data
from .scenarios import SCENARIOS, run_scenario
from .stability import NotWeakBarrierError, stability_report

EXIT_OK, EXIT_FALSE, EXIT_PARSE, EXIT_DEGENERATE, EXIT_NOT_CONVERGED, EXIT_UNDECIDED = 0, 1, 2, 3, 4, 5

log = logging.getLogger("barrierkit")


def _emit(obj) -> None:
    print(io.dumps(obj))


def _polytope_report(P) -> dict:
    out = P.to_json()
    if P.dim == 2:
        out["perimeter"] = P.perimeter()
        out["area"] = P.volume()
    else:
        out["surface_area"] = P.surface_area()
        out["volume"] = P.volume()
    return out


def cmd_convexify(args) -> int:
    B = io.load_barrier(args.barrier)
    body = io.load_body(args.body) if args.body else None
    history = []
    if B.dim == 2:
        hull = convexify_2d(B)
    else:
        mu = orientation_measure(B)
        report = validate_minkowski_data(mu)
        if not report.ok:
            raise DegenerateError("; ".join(report.failures))
        try:
            sol = solve_minkowski(mu, tol=args.tol, max_iter=args.max_iter)
        except NotConvergedError as exc:
            if args.log and exc.solution is not None:
                _write_log(args.log, exc.solution.history)
            raise
        hull, history = sol.polytope, sol.history
    io.dump(_polytope_report(hull), args.out)
    if args.log:
        _write_log(args.log, history)
    if args.svg:
        Path(args.svg).write_text(io.render_svg(B, body, hull))
    _emit(_polytope_report(hull))
    return EXIT_OK


def _write_log(path, history) -> None:
    with open(path, "w") as fh:
        for it, r in history:
            fh.write(json.dumps({"iteration": it, "residual": r}) + "\n")


def cmd_check(args) -> int:
    B = io.load_barrier(args.barrier)
    K = io.load_body(args.body)
    if B.dim != K.dim:
        raise FormatError("barrier and body have different dimensions")
    report = {"seed": args.seed}
    code = EXIT_OK
    if args.mode in ("weak", "both"):
        weak = is_weak_barrier(B, K)
        report.update(weak.to_json())
        if weak.verdict is Verdict.FALSE:
            code = EXIT_FALSE
        elif weak.verdict is Verdict.UNDECIDED:
            code = EXIT_UNDECIDED
    if args.mode in ("strong", "both"):
        est = strong_barrier_mc(B, K, N=args.lines, seed=args.seed)
        report["strong"] = est.to_json()
        if est.misses > 0 and code == EXIT_OK:
            code = EXIT_FALSE
    _emit(report)
    return code


def cmd_stability(args) -> int:
    B = io.load_barrier(args.barrier)
    K = io.load_body(args.body)
    if B.dim != K.dim:
        raise FormatError("barrier and body have different dimensions")
    try:
        rep = stability_report(B, K, args.eps)
    except NotWeakBarrierError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FALSE
    _emit(rep)
    if args.csv == "-":
        sys.stdout.write(rep.beta_csv())
    elif args.csv:
        Path(args.csv).write_text(rep.beta_csv())
    return EXIT_OK


def cmd_demo(args) -> int:
    result = run_scenario(args.name)
    _emit(result)
    for c in result.failures():
        print(f"FAILED {c.name}: got {c.value}, expected {c.expected} (tol {c.tol})", file=sys.stderr)
    return EXIT_OK if result.passed else EXIT_FALSE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="barrierkit", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("convexify", help="write co(B) as polytope JSON")
    c.add_argument("barrier")
    c.add_argument("out")
    c.add_argument("--svg", help="also draw B, co(B) (and --body) as SVG (planar only)")
    c.add_argument("--body", help="body JSON to include in the SVG")
    c.add_argument("--log", help="line-delimited solver log (iteration, residual)")
    c.add_argument("--tol", type=float, default=1e-6)
    c.add_argument("--max-iter", type=int, default=500)
    c.set_defaults(func=cmd_convexify)

    c = sub.add_parser("check", help="weak (certified) and/or strong (sampled) barrier test")
    c.add_argument("barrier")
    c.add_argument("body")
    c.add_argument("--mode", choices=["weak", "strong", "both"], default="weak")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--lines", type=int, default=100_000)
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("stability", help="deficit, dbl and the J_beta table for a weak barrier")
    c.add_argument("barrier")
    c.add_argument("body")
    c.add_argument("--eps", type=float, default=0.0)
    c.add_argument("--csv", help="write the beta table as CSV ('-' for stdout)")
    c.set_defaults(func=cmd_stability)

    c = sub.add_parser("demo", help="run a built-in scenario and its checks")
    c.add_argument("name", choices=sorted(SCENARIOS))
    c.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (DegenerateError, InvalidDataError) as exc:
        print(f"error: degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except NotConvergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED


if __name__ == "__main__":
    sys.exit(main())
