import json
import random
from fractions import Fraction as F

import pytest

from convexflats.cli import dispatch, run_experiment
from convexflats.randgen import random_flat, random_gp_lines, random_gp_points
from convexflats.rational import frac_to_str


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def points_json(pts):
    return {"format": 1, "points": [[frac_to_str(c) for c in p] for p in pts]}


def lines_json(lines):
    return {"format": 1, "hyperplanes": [h.to_json() for h in lines]}


def test_gen_and_verify_octa(tmp_path, capsys):
    fam = tmp_path / "octa.json"
    assert dispatch(["gen-octa", "--d", "2", "--seed", "1", "--out", str(fam)]) == 0
    assert dispatch(["verify-octa", str(fam)]) == 0
    out = capsys.readouterr().out
    assert "certified" in out


def test_gen_octa_out_of_range():
    assert dispatch(["gen-octa", "--d", "5"]) == 2


def test_unknown_verb():
    assert dispatch(["frobnicate"]) == 2


def test_seed_determinism(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert dispatch(["gen-octa", "--d", "3", "--seed", "9", "--out", str(a)]) == 0
    assert dispatch(["gen-octa", "--d", "3", "--seed", "9", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    n1, n2 = tmp_path / "n1.json", tmp_path / "n2.json"
    for out in (n1, n2):
        assert (
            dispatch(
                ["net", "--d", "2", "--k", "1", "--eps", "0.4", "--seed", "5",
                 "--audit-samples", "2000", "--out", str(out)]
            )
            == 0
        )
    assert n1.read_bytes() == n2.read_bytes()


def test_check_points_certified(tmp_path):
    pts = [(F(0), F(0)), (F(4), F(1)), (F(5), F(6)), (F(-1), F(3))]
    src = write(tmp_path / "pts.json", points_json(pts))
    cert = tmp_path / "cert.json"
    assert dispatch(["check-points", src, "--cert-out", str(cert)]) == 0
    assert dispatch(["verify-cert", str(cert)]) == 0
    # non-convex set exits 1
    bad = write(tmp_path / "bad.json", points_json(pts + [(F(2), F(2))]))
    assert dispatch(["check-points", bad]) == 1


def test_check_lines_certified(tmp_path):
    lines = random_gp_lines(random.Random(15), 4)
    src = write(tmp_path / "lines.json", lines_json(lines))
    cert = tmp_path / "cert.json"
    assert dispatch(["check-lines", src, "--cert-out", str(cert)]) == 0
    assert dispatch(["verify-cert", str(cert)]) == 0


def test_check_lines_octa_negative(tmp_path):
    fam = tmp_path / "octa.json"
    dispatch(["gen-octa", "--d", "2", "--seed", "1", "--out", str(fam)])
    assert dispatch(["check-lines", str(fam)]) == 1


def test_check_hyperplanes(tmp_path):
    tet = {
        "format": 1,
        "hyperplanes": [
            {"normal": ["1", "0", "0"], "offset": "0"},
            {"normal": ["0", "1", "0"], "offset": "0"},
            {"normal": ["0", "0", "1"], "offset": "0"},
            {"normal": ["1", "1", "1"], "offset": "1"},
        ],
    }
    src = write(tmp_path / "tet.json", tet)
    cert = tmp_path / "cert.json"
    assert dispatch(["check-hyperplanes", src, "--cert-out", str(cert)]) == 0
    assert dispatch(["verify-cert", str(cert)]) == 0


def test_verify_cert_rejects_garbage(tmp_path):
    bad = write(tmp_path / "bad.json", {"format": 1, "flats": [], "touch_sets": [], "supports": [], "interior_block": []})
    assert dispatch(["verify-cert", bad]) == 1


def test_extract_flats(tmp_path):
    flats = [random_flat(random.Random(70 + i), 3, 1) for i in range(5)]
    src = write(tmp_path / "flats.json", {"format": 1, "flats": [f.to_json() for f in flats]})
    out = tmp_path / "res.json"
    assert dispatch(["extract", src, "--n", "4", "--seed", "2", "--out", str(out)]) == 0
    res = json.loads(out.read_text())
    cert = tmp_path / "cert.json"
    cert.write_text(json.dumps(res["certificate"]))
    assert dispatch(["verify-cert", str(cert)]) == 0
    # asking for more than exists fails with exit 1
    assert dispatch(["extract", src, "--n", "6", "--seed", "2"]) == 1


def test_net_section_refute(tmp_path):
    net = tmp_path / "net.json"
    assert (
        dispatch(
            ["net", "--d", "3", "--k", "2", "--eps", "0.5", "--seed", "4",
             "--audit-samples", "2000", "--out", str(net)]
        )
        == 0
    )
    flats = tmp_path / "flats.json"
    assert dispatch(["section", "--net", str(net), "--out", str(flats)]) == 0
    got = json.loads(flats.read_text())
    assert all(f["d"] == 2 and f["k"] == 1 for f in got["flats"])

    net1 = tmp_path / "net1.json"
    assert (
        dispatch(
            ["net", "--d", "3", "--k", "1", "--eps", "0.3", "--seed", "4",
             "--audit-samples", "2000", "--out", str(net1)]
        )
        == 0
    )
    cone = write(
        tmp_path / "cone.json",
        {"format": 1, "d": 3, "generators": [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]], "halfspaces": None},
    )
    out = tmp_path / "ref.json"
    assert dispatch(["refute-cone", "--cone", cone, "--net", str(net1), "--out", str(out)]) == 0
    ref = json.loads(out.read_text())
    assert ref["kind"] in ("early", "full")


def test_experiment_modes(tmp_path):
    rows = run_experiment("points", 2, 0, 4, 5, 25, seed=0)
    assert len(rows) == 25
    assert all(r[2] >= 4 and r[3] == 1 for r in rows)  # ES guarantee at N=5

    rows = run_experiment("lines", 2, 0, 4, 4, 10, seed=0)
    assert all(r[3] == 1 for r in rows)

    rows = run_experiment("flats", 3, 1, 4, 5, 5, seed=0)
    assert all(r[2] == 4 and r[3] == 1 for r in rows)

    out = tmp_path / "table.csv"
    assert (
        dispatch(
            ["experiment", "--mode", "points", "--d", "2", "--n", "4", "--N", "5",
             "--trials", "10", "--seed", "3", "--out", str(out)]
        )
        == 0
    )
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "seed,N,found_size,verified"
    assert len(lines) == 11
