import json

import pytest

from rotsets.cli import EXIT_BUDGET, EXIT_INVALID, EXIT_OK, main
from rotsets.potential import LocallyConstantPotential
from rotsets.shift import full_shift


@pytest.fixture
def files(tmp_path):
    s = full_shift(2)
    E = LocallyConstantPotential.from_table(s, 1, {"0": (1, 0), "1": (0, 1)})
    Z = LocallyConstantPotential.constant(s, (0, 0))
    paths = {}
    for name, obj in {
        "E": E.to_json(),
        "Z": Z.to_json(),
        "tri": {"dim": 2, "vertices": [[0, 0], [4, 0], [0, 4]]},
        "square": {"dim": 2, "vertices": [[-1, -1], [1, -1], [1, 1], [-1, 1]]},
    }.items():
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(obj))
        paths[name] = str(p)
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    paths["bad"] = str(bad)
    return paths


def test_rotation_writes_the_polytope(files, tmp_path, capsys):
    out = tmp_path / "rot"
    assert main(["rotation", files["E"], "--out", str(out)]) == EXIT_OK
    data = json.loads((out / "polytope.json").read_text())
    assert data["vertices"] == [[0, 1], [1, 0]]
    assert set(data["witnesses"].values()) == {"0", "1"}


def test_malformed_input(files, tmp_path):
    assert main(["rotation", files["bad"], "--out", str(tmp_path)]) == EXIT_INVALID
    assert main(["rotation", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == EXIT_INVALID
    assert main(["nonsense"]) == EXIT_INVALID


def test_rank_cap(files, tmp_path):
    assert main(["rotation", files["E"], "--rank-cap", "0", "--out", str(tmp_path)]) == EXIT_BUDGET


def test_realize_triangle(files, tmp_path):
    out = tmp_path / "real"
    code = main(["realize", files["Z"], files["tri"], "--tol", "0.05", "--out", str(out)])
    assert code == EXIT_OK
    cert = json.loads((out / "certificate.json").read_text())
    assert cert["all_hold"] and cert["constants"]["kappa"] == "29/30"
    assert (out / "trace.csv").read_text().startswith("iter,")
    assert (out / "realize.svg").read_text().startswith("<svg")
    assert json.loads((out / "potential.json").read_text())["dim"] == 2


def test_realize_needs_positive_tol(files, tmp_path):
    assert main(["realize", files["Z"], files["tri"], "--tol", "0", "--out", str(tmp_path)]) == EXIT_INVALID


def test_fish_outputs(tmp_path):
    out = tmp_path / "fish"
    assert main(["fish", "6", "10", "--out", str(out), "--emit", "json,csv"]) == EXIT_OK
    assert (out / "fish.json").exists() and (out / "fish_angles.csv").exists()
    assert not (out / "fish.svg").exists()
    assert main(["fish", "0", "--out", str(out)]) == EXIT_INVALID


def test_analyze_square(files, tmp_path):
    out = tmp_path / "an"
    assert main(["analyze", files["square"], "--threshold", "1.0", "--out", str(out)]) == EXIT_OK
    assert len(json.loads((out / "report.json").read_text())["corners"]) == 4


def test_probe_is_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["probe", "--samples", "3", "--ranks", "1-2", "--seed", "9", "--out", str(d)]) == EXIT_OK
    assert (a / "probe.json").read_bytes() == (b / "probe.json").read_bytes()
    assert (a / "probe.csv").read_bytes() == (b / "probe.csv").read_bytes()
