import json
import math
import subprocess
import sys

import numpy as np
import pytest

from emptybox import cli, pointgen
from emptybox.core import OpenBox, normalize_to_unit
from emptybox.verify import strip_timing


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == cli.EXIT_OK, err
    return json.loads(out)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_gen_vdc(capsys):
    doc = report(capsys, "gen", "--generator", "vdc", "--n", "4", "--output", "json")
    assert list(doc) == ["dim", "region", "points"]
    assert doc["points"] == [[0, 0], [0.25, 0.5], [0.5, 0.25], [0.75, 0.75]]


@pytest.mark.parametrize(
    "flags",
    [
        ["--generator", "uniform", "--n", "30", "--dim", "3", "--seed", "5"],
        ["--generator", "halton", "--n", "20", "--dim", "4"],
        ["--generator", "restricted-lb", "--counts", "3,4"],
        ["--generator", "tight2"],
    ],
)
def test_gen_round_trip_is_bit_exact(capsys, tmp_path, flags):
    doc = report(capsys, "gen", *flags)
    path = write(tmp_path, "pts.json", json.dumps(doc))
    points, region, given = cli.ingest(path)
    assert given and region == OpenBox.unit(points.dim)
    original = np.array(doc["points"], dtype=np.float64)
    assert points.points.tobytes() == original.tobytes()


def test_gen_grid_uses_n_per_axis(capsys):
    doc = report(capsys, "gen", "--generator", "grid", "--n", "3", "--dim", "2")
    assert len(doc["points"]) == 9


def test_csv_parsing(tmp_path):
    pts = cli.parse_csv("0.5,0.5\n")
    assert len(pts) == 1 and pts.dim == 2
    pts = cli.parse_csv("x,y,z\n0.1,0.2,0.3\n\n0.4,0.5,0.6\n")
    assert pts.tolist() == [[0.1, 0.2, 0.3], [0.4, 0.5, 0.6]]
    with pytest.raises(cli.DataError, match="line 3"):
        cli.parse_csv("0.1,0.2\n0.3,0.4\n0.5\n")
    with pytest.raises(cli.DataError, match="line 2"):
        cli.parse_csv("0.1,0.2\n0.3,abc\n")
    with pytest.raises(cli.DataError, match="expected 3"):
        cli.parse_csv("0.1,0.2\n", dim=3)


def test_json_region_normalizes(tmp_path):
    path = write(tmp_path, "p.json", json.dumps({"dim": 2, "region": {"lo": [0, 0], "hi": [4, 4]}, "points": [[1, 1]]}))
    points, region, given = cli.ingest(path)
    unit, _ = normalize_to_unit(points, region)
    assert unit.tolist() == [[0.25, 0.25]]
    with pytest.raises(cli.DataError, match="point 1"):
        cli.parse_json(json.dumps({"dim": 2, "points": [[0.1, 0.2], [0.3]]}))


def test_default_region_is_padded_bounding_box(tmp_path):
    path = write(tmp_path, "p.csv", "0,10\n100,20\n")
    _, region, given = cli.ingest(path)
    assert not given
    assert region.lo == pytest.approx((-1.0, 9.9)) and region.hi == pytest.approx((101.0, 20.1))


def test_approx_box_report(capsys, tmp_path):
    rng = np.random.default_rng(7)
    arr = rng.uniform(-5, 5, size=(10, 2))
    path = write(tmp_path, "pts.csv", "\n".join(",".join(map(repr, row)) for row in arr.tolist()))
    rep = report(capsys, "approx-box", "--input", path, "--epsilon", "0.25", "--seed", "7")
    exact = report(capsys, "exact-box", "--input", path)
    assert list(rep)[0] == "schema" and rep["schema"] == 1
    assert rep["parameters"]["seed"] == 7
    assert rep["result"]["volume_unit"] >= 0.75 * exact["result"]["volume_unit"] - 1e-12
    assert rep["bounds"]["canonical_count"]["within_binomial"]
    for r in (rep, exact):
        lo, hi = np.array(r["region"]["lo"]), np.array(r["region"]["hi"])
        scale = float(np.prod(hi - lo))
        res = r["result"]
        assert math.isclose(res["volume_input"], res["volume_unit"] * scale, rel_tol=1e-10)
        box_in = np.array(res["input"]["hi"]) - np.array(res["input"]["lo"])
        assert math.isclose(float(np.prod(box_in)), res["volume_input"], rel_tol=1e-10)


def test_threads_do_not_change_report(capsys, tmp_path):
    doc = report(capsys, "gen", "--generator", "uniform", "--n", "40", "--dim", "3", "--seed", "2")
    path = write(tmp_path, "pts.json", json.dumps(doc))
    outs = []
    for t in ("1", "3"):
        code, out, _ = run(capsys, "approx-box", "--input", path, "--epsilon", "0.3", "--threads", t)
        assert code == 0
        outs.append(json.dumps(strip_timing(json.loads(out))))
    assert outs[0] == outs[1]


def test_cube_and_restricted_commands(capsys, tmp_path):
    doc = report(capsys, "gen", "--generator", "grid", "--n", "3", "--dim", "2")
    path = write(tmp_path, "grid.json", json.dumps(doc))
    cube = report(capsys, "exact-cube", "--input", path)
    assert cube["result"]["volume_unit"] == pytest.approx(1 / 16, abs=1e-12)
    approx = report(capsys, "approx-cube", "--input", path, "--epsilon", "0.1")
    assert approx["result"]["volume_unit"] >= 0.9 / 16
    doc = report(capsys, "gen", "--generator", "restricted-lb", "--counts", "2,2")
    path = write(tmp_path, "lb.json", json.dumps(doc))
    rc = report(capsys, "restricted-count", "--input", path)
    assert 9 <= rc["result"]["count"] <= 36


def test_bounds_command(capsys):
    rep = report(capsys, "bounds", "--n", "100", "--dim", "3")
    assert rep["bounds"]["A_d"]["upper"] == pytest.approx(0.24, abs=1e-15)
    rep = report(capsys, "bounds", "--n", "100", "--dim", "3", "--epsilon", "0.5")
    assert rep["bounds"]["canonical_count"]["extra"]["placement_closed_form"] == 2_073_600


def test_seed_from_environment(capsys, tmp_path, monkeypatch):
    path = write(tmp_path, "p.csv", "0.2,0.3\n0.7,0.6\n")
    monkeypatch.setenv(cli.SEED_ENV, "42")
    rep = report(capsys, "approx-box", "--input", path, "--epsilon", "0.5")
    assert rep["parameters"]["seed"] == 42
    rep = report(capsys, "approx-box", "--input", path, "--epsilon", "0.5", "--seed", "3")
    assert rep["parameters"]["seed"] == 3
    monkeypatch.setenv(cli.SEED_ENV, "x")
    assert run(capsys, "approx-box", "--input", path, "--epsilon", "0.5")[0] == cli.EXIT_USAGE
    monkeypatch.delenv(cli.SEED_ENV)
    assert report(capsys, "approx-box", "--input", path, "--epsilon", "0.5")["parameters"]["seed"] == 0


def test_exit_codes(capsys, tmp_path):
    good = write(tmp_path, "p.csv", "0.2,0.3\n0.7,0.6\n")
    assert run(capsys, "approx-box", "--input", good, "--epsilon", "0.5")[0] == cli.EXIT_OK
    assert run(capsys, "approx-box", "--input", good)[0] == cli.EXIT_USAGE
    assert run(capsys, "approx-box", "--bogus")[0] == cli.EXIT_USAGE
    assert run(capsys, "frobnicate")[0] == cli.EXIT_USAGE
    assert run(capsys, "approx-box", "--input", good, "--epsilon", "1.5")[0] == cli.EXIT_USAGE
    bad = write(tmp_path, "bad.csv", "0.2,0.3\n0.7\n")
    code, _, err = run(capsys, "approx-box", "--input", bad, "--epsilon", "0.5")
    assert code == cli.EXIT_DATA and "line 2" in err
    assert run(capsys, "exact-box", "--input", str(tmp_path / "missing.csv"))[0] == cli.EXIT_DATA
    big = pointgen.uniform_random(13, 3, seed=1)
    path = write(tmp_path, "big.csv", "\n".join(",".join(map(repr, p)) for p in big.tolist()))
    code, _, err = run(capsys, "exact-box", "--input", path)
    assert code == cli.EXIT_GUARD and "--force" in err
    assert run(capsys, "exact-box", "--input", path, "--force")[0] == cli.EXIT_OK


def test_text_output(capsys, tmp_path):
    path = write(tmp_path, "p.csv", "0.2,0.3\n0.7,0.6\n")
    code, out, _ = run(capsys, "approx-box", "--input", path, "--epsilon", "0.5", "--output", "text")
    assert code == 0 and out.startswith("approx-box: d=2, n=2")


def test_stdin_and_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "emptybox", "exact-box", "--input", "-", "--format", "csv"],
        input="0.5,0.5\n", capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0, proc.stderr
    rep = json.loads(proc.stdout)
    assert rep["n"] == 1
