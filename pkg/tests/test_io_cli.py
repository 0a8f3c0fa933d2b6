import io
import json
import os
import re

import numpy as np
import pytest

from framedcurves import (CurvatureTorsionProfile, DomainError, integrate_frame, read_curve_csv,
                          solve, write_curve_csv)
from framedcurves.cli import run
from framedcurves.io import CSV_HEADER, curve_to_svg, export_curve, jsonable
from framedcurves.tables import TABLE3

TWO_PI = 2 * np.pi


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def load_record(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def without_duration(rec):
    return {k: v for k, v in rec.items() if k != "duration_s"}


@pytest.fixture
def circle():
    return integrate_frame(CurvatureTorsionProfile.constant(1.0, 0.0, TWO_PI, 4096))


def test_csv_format(circle, tmp_path):
    path = write_curve_csv(circle, tmp_path / "c.csv")
    raw = open(path, "rb").read()
    assert b"\r" not in raw
    lines = raw.decode("utf-8").split("\n")
    assert lines[0] == CSV_HEADER
    assert lines[-1] == ""
    rows = lines[1:-1]
    assert len(rows) == 4097
    assert all(len(r.split(",")) == 15 and not r.endswith(",") for r in rows)


def test_csv_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    curve = integrate_frame(CurvatureTorsionProfile(3.3, rng.normal(size=101),
                                                    rng.normal(size=101)))
    back = read_curve_csv(write_curve_csv(curve, tmp_path / "r.csv"))
    np.testing.assert_array_equal(back.positions, curve.positions)
    np.testing.assert_array_equal(back.frames, curve.frames)
    np.testing.assert_array_equal(back.profile.kappa, curve.profile.kappa)


def test_read_rejects_foreign_csv(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(DomainError):
        read_curve_csv(p)


def test_svg_circle(circle):
    svg = curve_to_svg(circle)
    assert svg.count("<polyline") == 1 and 'fill="none"' in svg
    pts = re.search(r'points="([^"]+)"', svg).group(1).split()
    first = np.array(pts[0].split(","), dtype=float)
    last = np.array(pts[-1].split(","), dtype=float)
    assert np.linalg.norm(first - last) <= 1e-9
    vb = np.array(re.search(r'viewBox="([^"]+)"', svg).group(1).split(), dtype=float)
    # bounding box 2 x 2 plus 5% margin of 2 on each side
    np.testing.assert_allclose(vb, [-1.1, -2.1, 2.2, 2.2], atol=1e-9)
    width = float(re.search(r'stroke-width="([^"]+)"', svg).group(1))
    assert width == pytest.approx(0.01, rel=1e-9)


def test_svg_table3_xz():
    curve = solve(dict(TABLE3)["4a"]).curve()
    svg = curve_to_svg(curve, "xz")
    pts = re.search(r'points="([^"]+)"', svg).group(1).split()
    coords = np.array([p.split(",") for p in pts], dtype=float)
    assert coords.shape[0] == curve.positions.shape[0]
    assert np.all(np.isfinite(coords))
    with pytest.raises(DomainError):
        curve_to_svg(curve, "xw")


def test_export_curve_formats(circle, tmp_path):
    paths = export_curve(circle, tmp_path / "sub" / "loop", ("csv", "svg"), "yz")
    assert [os.path.basename(p) for p in paths] == ["loop.csv", "loop.svg"]
    assert all(os.path.exists(p) for p in paths)
    assert not [f for f in os.listdir(tmp_path / "sub") if f.startswith(".tmp")]


def test_export_unwritable(circle, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(DomainError):
        export_curve(circle, blocker / "x.csv")


def test_jsonable_non_finite():
    assert jsonable({"a": np.inf, "b": [np.nan, -np.inf, np.float64(1.5)]}) == \
        {"a": "inf", "b": ["nan", "-inf", 1.5]}


def test_cli_solve_circle(tmp_path):
    out = tmp_path / "circle.csv"
    code, stdout, _ = cli("solve", "--model", "planar", "--c1", "1.0", "--k0", "1.0",
                          "--k1", "0.0", "--length", "6.283185307", "--out", str(out))
    assert code == 0
    rec = json.loads(stdout)
    assert set(rec) == {"version", "command", "config", "metrics", "outputs", "duration_s"}
    assert rec["outputs"] == [str(out)]
    data = np.loadtxt(out, delimiter=",", skiprows=1)
    assert data.shape == (4097, 15)
    assert np.max(np.abs(data[:, 13] - 1)) <= 1e-10


def test_cli_reproduce_table1(tmp_path):
    runs = tmp_path / "runs"
    code, _, _ = cli("reproduce", "--table", "1", "--out-dir", str(runs))
    assert code == 0
    files = sorted(os.listdir(runs))
    assert files == ["table1.json", "table1_circumference.csv", "table1_lemniscate.csv"]
    rec = load_record(runs / "table1.json")
    assert [r["label"] for r in rec["metrics"]["rows"]] == ["circumference", "lemniscate"]
    assert all(isinstance(r["d"], float) for r in rec["metrics"]["rows"])


def test_cli_search_deterministic(tmp_path):
    cfg = tmp_path / "search.json"
    cfg.write_text(json.dumps({"budget": 40, "seed": 3, "n": 512,
                               "ranges": {"c1": [0.9, 1.1], "kappa0": [0.9, 1.1],
                                          "kappa1": [-0.01, 0.01]},
                               "lengths": [TWO_PI]}))
    recs = []
    for name, threads in (("a", "1"), ("b", "1"), ("c", "3")):
        path = tmp_path / f"{name}.json"
        assert cli("search", "--model", "planar", "--config", str(cfg),
                   "--threads", threads, "--record", str(path))[0] == 0
        recs.append(load_record(path))
    a, b, c = (without_duration(r) for r in recs)
    assert a == b
    assert open(tmp_path / "a.json").read().replace(str(recs[0]["duration_s"]), "") == \
        open(tmp_path / "b.json").read().replace(str(recs[1]["duration_s"]), "")
    c["config"]["threads"] = a["config"]["threads"]
    assert a == c
    assert a["metrics"]["trials"] == 40


def test_cli_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("ELASTICA_SEED", "17")
    code, stdout, _ = cli("search", "--budget", "2", "--n", "64", "--threads", "1")
    assert code == 0 and json.loads(stdout)["config"]["seed"] == 17
    code, stdout, _ = cli("search", "--budget", "2", "--n", "64", "--seed", "4")
    assert json.loads(stdout)["config"]["seed"] == 4


def test_cli_config_replays(tmp_path):
    code, stdout, _ = cli("verify", "--model", "space", "--c1", "3", "--c2", "1", "--k0", "1",
                          "--k1", "0.1", "--n", "1024")
    assert code == 0
    rec = json.loads(stdout)
    cfg = tmp_path / "replay.json"
    cfg.write_text(json.dumps({k: v for k, v in rec["config"].items()}))
    code, stdout2, _ = cli("verify", "--config", str(cfg))
    assert code == 0
    assert json.loads(stdout2)["metrics"] == rec["metrics"]


def test_cli_flags_override_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"kappa": 2.0, "n": 100}))
    code, stdout, _ = cli("energy", "--config", str(cfg), "--kappa", "1.0")
    rec = json.loads(stdout)
    assert code == 0 and rec["config"]["kappa"] == 1.0 and rec["config"]["n"] == 100
    assert rec["metrics"]["energy"] == pytest.approx(TWO_PI, abs=1e-12)


def test_cli_energy_probe():
    code, stdout, _ = cli("energy", "--density", "sadowsky", "--probe", "--pairs", "100")
    probe = json.loads(stdout)["metrics"]["probe"]
    assert code == 0 and probe["ok"] and probe["coercivity"]["count"] == 0


def test_cli_exit_codes(tmp_path):
    assert cli("solve", "--model", "quadratic", "--c", "1", "--k0", "0")[0] == 1
    assert cli("solve", "--bogus")[0] == 2
    assert cli("frobnicate")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"no_such_key": 1}))
    assert cli("solve", "--config", str(bad))[0] == 2
    bad.write_text("{not json")
    assert cli("solve", "--config", str(bad))[0] == 2
    blocker = tmp_path / "f"
    blocker.write_text("")
    code, _, err = cli("integrate", "--n", "16", "--out", str(blocker / "x.csv"))
    assert code == 1 and err.startswith("error:")


def test_cli_integrate_and_minimize(tmp_path):
    code, stdout, _ = cli("integrate", "--kappa", "1", "--tau", "0.5", "--length", "12.566",
                          "--n", "256", "--svg", str(tmp_path / "h.svg"), "--plane", "xz")
    assert code == 0 and os.path.exists(tmp_path / "h.svg")
    assert json.loads(stdout)["metrics"]["orthonormality_drift"] < 1e-13
    code, stdout, _ = cli("minimize", "--density", "quadratic", "--n", "40", "--max-iter", "50")
    m = json.loads(stdout)["metrics"]
    assert code == 0 and m["iterations"] == 50 and not m["converged"]


def test_cli_refine(tmp_path):
    code, stdout, _ = cli("refine", "--c1", "1.00824", "--k0", "1.01227", "--k1", "0.0003",
                          "--out", str(tmp_path / "r.csv"))
    m = json.loads(stdout)["metrics"]
    assert code == 0 and m["success"] and m["d"] <= 1e-6
    assert os.path.exists(tmp_path / "r.csv")
