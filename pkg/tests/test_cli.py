import json
import math
import subprocess
import sys

import numpy as np
import pytest

from barrierkit import cli, io
from barrierkit.analysis import CertifiedBool, Verdict
from barrierkit.geometry import Ball, Polytope
from barrierkit.measures import Barrier, DirectionalMeasure, orientation_measure
from barrierkit.samples import random_symmetric_polytope
from barrierkit.scenarios import half_boundary, steiner_barrier, unit_square


@pytest.fixture
def files(tmp_path, cube):
    Q = unit_square()
    paths = {}
    objs = {
        "steiner": steiner_barrier(), "Q": Q, "half": half_boundary(Q),
        "diag": Barrier([[[-.5, -.5], [.5, .5]]]),
        "cross": Barrier([[[-.5, 0], [.5, 0]], [[0, -.5], [0, .5]]]),
        "box": cube, "boxB": Barrier.from_polytope_boundary(cube),
        "poly3B": Barrier.from_polytope_boundary(random_symmetric_polytope(3, 8, np.random.default_rng(3))),
    }
    for k, v in objs.items():
        paths[k] = str(tmp_path / f"{k}.json")
        io.dump(v, paths[k])
    paths["bad"] = str(tmp_path / "bad.json")
    (tmp_path / "bad.json").write_text("{not json")
    paths["dir"] = tmp_path
    return paths


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_convexify_steiner(files, capsys):
    out = files["dir"] / "co.json"
    svg = files["dir"] / "co.svg"
    code, stdout, _ = run(capsys, "convexify", files["steiner"], out, "--svg", svg, "--body", files["Q"])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["perimeter"] == pytest.approx(2 * steiner_barrier().length())
    assert json.loads(stdout) == data
    text = svg.read_text()
    assert text.startswith("<svg") and text.count("<line") == 4 and text.count("<polygon") == 2


def test_convexify_cross_gives_square(files, capsys):
    out = files["dir"] / "sq.json"
    assert run(capsys, "convexify", files["cross"], out)[0] == 0
    P = io.load(out)
    assert P.volume() == pytest.approx(1) and len(P.vertices) == 4


def test_convexify_exit_codes(files, capsys):
    out = files["dir"] / "x.json"
    assert run(capsys, "convexify", files["diag"], out)[0] == cli.EXIT_DEGENERATE
    assert run(capsys, "convexify", files["bad"], out)[0] == cli.EXIT_PARSE
    assert run(capsys, "convexify", files["Q"], out)[0] == cli.EXIT_PARSE
    code = run(capsys, "convexify", files["poly3B"], out, "--max-iter", 1, "--tol", 1e-14)[0]
    assert code == cli.EXIT_NOT_CONVERGED


def test_convexify_space_with_log(files, capsys):
    out, log = files["dir"] / "c3.json", files["dir"] / "c3.jsonl"
    assert run(capsys, "convexify", files["boxB"], out, "--log", log)[0] == 0
    assert io.load(out).volume() == pytest.approx(2 ** 1.5)
    records = [json.loads(line) for line in log.read_text().splitlines()]
    assert records and set(records[0]) == {"iteration", "residual"}


def test_check_weak(files, capsys):
    code, stdout, _ = run(capsys, "check", files["steiner"], files["Q"])
    assert code == 0 and json.loads(stdout)["verdict"] == "true"
    code, stdout, _ = run(capsys, "check", files["diag"], files["Q"])
    rep = json.loads(stdout)
    assert code == 1 and rep["verdict"] == "false"
    assert abs(abs(sum(rep["witness"])) / math.sqrt(2) - 1) < 1e-9


def test_check_strong(files, capsys):
    code, stdout, _ = run(capsys, "check", files["half"], files["Q"], "--mode", "strong", "--lines", 20000)
    rep = json.loads(stdout)
    assert code == 1 and abs(rep["strong"]["miss_fraction"] - 0.5) < 0.03
    assert rep["seed"] == 0
    code, stdout, _ = run(capsys, "check", files["steiner"], files["Q"], "--mode", "both", "--lines", 5000)
    assert code == 0 and json.loads(stdout)["strong"]["misses"] == 0


def test_check_undecided(files, capsys, monkeypatch):
    monkeypatch.setattr(cli, "is_weak_barrier", lambda B, K: CertifiedBool(Verdict.UNDECIDED, -0.1))
    assert run(capsys, "check", files["boxB"], files["box"])[0] == cli.EXIT_UNDECIDED


def test_check_dimension_mismatch(files, capsys):
    assert run(capsys, "check", files["boxB"], files["Q"])[0] == cli.EXIT_PARSE


def test_stability(files, capsys):
    csv_path = files["dir"] / "beta.csv"
    code, stdout, _ = run(capsys, "stability", files["steiner"], files["Q"], "--csv", csv_path)
    rep = json.loads(stdout)
    assert code == 0 and rep["exponent"] == 0.25
    assert csv_path.read_text().startswith("beta,jbeta_mass")
    code, stdout, _ = run(capsys, "stability", files["half"], files["Q"])
    rep = json.loads(stdout)
    assert rep["equality_case"] and rep["deficit"] == 0 and rep["dbl"] == 0
    code, stdout, _ = run(capsys, "stability", files["boxB"], files["box"], "--eps", 0.01)
    assert json.loads(stdout)["exponent"] == pytest.approx(0.1170, abs=1e-4)
    code, _, err = run(capsys, "stability", files["diag"], files["Q"])
    assert code == 1 and "weak barrier" in err


@pytest.mark.parametrize("name", ["square-steiner", "half-boundary", "cylinder-3d"])
def test_demo(name, capsys):
    code, stdout, _ = run(capsys, "demo", name)
    rep = json.loads(stdout)
    assert code == 0 and rep["passed"]


def test_unknown_demo(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["demo", "nope"])
    assert info.value.code == 2


def test_console_script(files):
    res = subprocess.run([sys.executable, "-m", "barrierkit.cli", "check", files["diag"], files["Q"]],
                         capture_output=True, text=True)
    assert res.returncode == 1 and '"verdict": "false"' in res.stdout


@pytest.mark.parametrize("obj", [
    unit_square(), Ball([0.0, 1.0, 2.0], 0.5), steiner_barrier(),
    orientation_measure(steiner_barrier()),
    Barrier.from_polytope_boundary(Polytope(np.vstack([np.eye(3), -np.eye(3)]))),
], ids=["polytope", "ball", "segments", "measure", "triangles"])
def test_json_round_trip(obj, tmp_path):
    path = tmp_path / "o.json"
    io.dump(obj, path)
    first = path.read_text()
    back = io.load(path)
    assert io.dumps(back) + "\n" == first


def test_load_body_from_ball(tmp_path):
    path = tmp_path / "b.json"
    io.dump(Ball([0.0, 0.0], 1.0), path)
    P = io.load_body(path)
    assert P.max_vertex_norm() == pytest.approx(1)


def test_parse_errors():
    with pytest.raises(io.FormatError):
        io.parse({"foo": 1})
    with pytest.raises(io.FormatError):
        io.parse({"dim": 3, "vertices": [[0, 0], [1, 0], [0, 1]]})
    with pytest.raises(io.FormatError):
        io.parse({"segments": [[0, 1]]})
