import json

import numpy as np
import pytest

from heiscurves.cli import main
from heiscurves.formats import read_curve, read_profile, write_curve, write_profile, write_symmetry
from heiscurves.frames import InvariantProfile
from heiscurves.heis_core import random_symmetry

S = np.linspace(0.0, 1.0, 1001)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def geodesic_file(tmp_path, capsys):
    path = tmp_path / "geo.json"
    assert run(capsys, "geodesic", "--n", 1, "--lambda", 1, "--A", "1", "--B", "0", "--out", path)[0] == 0
    return path


@pytest.fixture
def profile2_file(tmp_path):
    path = tmp_path / "p2.csv"
    write_profile(InvariantProfile(S, [1 + 0.3 * np.sin(S), 0.5 * np.cos(S)], 0.2 * S), path)
    return path


def test_analyze_geodesic(tmp_path, capsys, geodesic_file):
    code, out, err = run(capsys, "analyze", "--input", geodesic_file)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "s,kappa_1,tau"
    table = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    assert np.max(np.abs(table[:, 1] + 2)) < 1e-4
    assert np.max(np.abs(table[:, 2])) < 1e-6
    assert json.loads(err)["order"] == 1


def test_analyze_line(tmp_path, capsys):
    path = tmp_path / "line.json"
    assert run(capsys, "geodesic", "--n", 1, "--lambda", 0, "--A", "1", "--B", "0", "--out", path)[0] == 0
    prof, rep = tmp_path / "p.csv", tmp_path / "r.json"
    assert run(capsys, "analyze", "--input", path, "--out-profile", prof, "--out-report", rep)[0] == 0
    p = read_profile(prof)
    assert np.max(np.abs(p.kappas)) < 1e-10 and np.max(np.abs(p.tau)) < 1e-12
    assert json.loads(rep.read_text())["nondegenerate"]


def test_synthesize_analyze_round_trip(tmp_path, capsys, profile2_file):
    curve = tmp_path / "c.json"
    assert run(capsys, "synthesize", "--profile", profile2_file, "--out", curve)[0] == 0
    out = tmp_path / "back.csv"
    assert run(capsys, "analyze", "--input", curve, "--out-profile", out, "--out-report", tmp_path / "r.json")[0] == 0
    assert np.max(read_profile(out).sup_differences(read_profile(profile2_file))) < 1e-3


def test_synthesize_n3_round_trip(tmp_path, capsys):
    src = tmp_path / "p3.csv"
    write_profile(InvariantProfile(S, [1.2 + 0.2 * np.cos(2 * S), 0.8 + 0.3 * S, -0.4 + 0.5 * np.sin(S)],
                                   0.1 - 0.3 * S ** 2), src)
    curve = tmp_path / "c.json"
    assert run(capsys, "synthesize", "--profile", src, "--n", 3, "--out", curve)[0] == 0
    out = tmp_path / "back.csv"
    assert run(capsys, "analyze", "--input", curve, "--out-profile", out, "--out-report", tmp_path / "r.json")[0] == 0
    assert np.max(read_profile(out).sup_differences(read_profile(src))) < 1e-3


def test_synthesize_constant_curvature(tmp_path, capsys):
    src = tmp_path / "p.csv"
    write_profile(InvariantProfile(S, [np.full(S.size, -2.0)], np.zeros(S.size)), src)
    curve = tmp_path / "c.json"
    assert run(capsys, "synthesize", "--profile", src, "--out", curve)[0] == 0
    geo = tmp_path / "g.json"
    run(capsys, "geodesic", "--n", 1, "--lambda", 1, "--A", "0", "--B", "1", "--x0", "2", "--out", geo)
    code, out, _ = run(capsys, "congruence", "--a", curve, "--b", geo)
    assert code == 0
    assert json.loads(out)["alignment_residual"] < 1e-6


def test_synthesize_resample(tmp_path, capsys):
    s = np.linspace(0, 1, 51)
    src = tmp_path / "coarse.csv"
    write_profile(InvariantProfile(s, [np.ones(51)], np.zeros(51)), src)
    out = tmp_path / "c.json"
    assert run(capsys, "synthesize", "--profile", src, "--resample", "--step", "1e-3", "--out", out)[0] == 0
    assert len(read_curve(out)) == 1001


def test_synthesize_nonuniform_profile(tmp_path, capsys):
    s = np.sort(np.concatenate([np.linspace(0, 1, 50), [0.0101]]))
    src = tmp_path / "p.csv"
    write_profile(InvariantProfile(s, [np.ones(s.size)], np.zeros(s.size)), src)
    assert run(capsys, "synthesize", "--profile", src, "--out", tmp_path / "c.json")[0] == 64


def test_congruence_transformed_file(tmp_path, capsys, profile2_file, rng):
    a = tmp_path / "a.json"
    run(capsys, "synthesize", "--profile", profile2_file, "--out", a)
    phi = random_symmetry(2, rng)
    b = tmp_path / "b.json"
    write_curve(read_curve(a).transformed(phi), b)
    g = tmp_path / "g.json"
    assert run(capsys, "congruence", "--a", a, "--b", b, "--out-symmetry", g)[0] == 0
    data = json.loads(g.read_text())
    np.testing.assert_allclose(np.array(data["rotation"]), phi.rotation, atol=1e-6)
    np.testing.assert_allclose(data["translation"], phi.translation.as_array(), atol=1e-6)


def test_congruence_identical(capsys, geodesic_file):
    code, out, _ = run(capsys, "congruence", "--a", geodesic_file, "--b", geodesic_file)
    assert code == 0
    np.testing.assert_allclose(json.loads(out)["rotation"], np.eye(2), atol=1e-10)


def test_congruence_distinct_geodesics(tmp_path, capsys, geodesic_file):
    other = tmp_path / "half.json"
    run(capsys, "geodesic", "--n", 1, "--lambda", 0.5, "--A", "1", "--B", "0", "--out", other)
    code, out, _ = run(capsys, "congruence", "--a", geodesic_file, "--b", other)
    assert code == 1
    rows = dict(line.split(",") for line in out.splitlines()[2:])
    assert abs(float(rows["kappa_1"]) - 1.0) < 1e-4


def test_congruence_orders_differ(tmp_path, capsys, profile2_file):
    a = tmp_path / "a.json"
    run(capsys, "synthesize", "--profile", profile2_file, "--out", a)
    b = tmp_path / "b.json"
    run(capsys, "geodesic", "--n", 2, "--lambda", 1, "--A", "1,0", "--B", "0,0", "--out", b)
    code, out, _ = run(capsys, "congruence", "--a", a, "--b", b)
    assert code == 1 and "(2 vs 1)" in out


def test_degenerate_analysis_and_reduction(tmp_path, capsys):
    geo = tmp_path / "g3.json"
    run(capsys, "geodesic", "--n", 3, "--lambda", 0.5, "--A", "0.6,0,0", "--B", "0,0,0.8",
        "--x0", "1,2,3", "--t0", "1", "--out", geo)
    code, _, err = run(capsys, "analyze", "--input", geo)
    assert code == 2 and "reduce" in err
    red, sym = tmp_path / "r.json", tmp_path / "s.json"
    assert run(capsys, "reduce", "--input", geo, "--out", red, "--out-symmetry", sym)[0] == 0
    assert read_curve(red).n == 1
    amb = tmp_path / "amb.json"
    assert run(capsys, "reduce", "--input", geo, "--out", amb, "--keep-ambient")[0] == 0
    assert read_curve(amb).n == 3
    assert run(capsys, "classify", "--input", red)[0] == 0


def test_reduce_top_order(tmp_path, capsys, geodesic_file):
    assert run(capsys, "reduce", "--input", geodesic_file, "--out", tmp_path / "x.json")[0] == 65


def test_non_arclength_input_is_reparametrized(tmp_path, capsys):
    t = np.linspace(0, 1, 801)
    pts = np.column_stack([2 * t + t ** 2, 0.5 * t ** 2, np.zeros_like(t)])
    src = tmp_path / "c.json"
    src.write_text(json.dumps({"n": 1, "params": t.tolist(), "points": pts.tolist()}))
    code, out, _ = run(capsys, "analyze", "--input", src, "--samples", 1001, "--out-report", tmp_path / "r.json")
    assert code == 0
    assert len(out.splitlines()) == 1002


def test_error_codes(tmp_path, capsys):
    assert run(capsys, "classify", "--input", tmp_path / "missing.json")[0] == 66
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "analyze", "--input", bad)[0] == 64
    vertical = tmp_path / "v.json"
    t = np.linspace(0, 1, 20)
    vertical.write_text(json.dumps({"n": 1, "params": t.tolist(), "points": [[0, 0, v] for v in t]}))
    assert run(capsys, "analyze", "--input", vertical)[0] == 65
    with pytest.raises(SystemExit) as exc:
        main(["analyze"])
    assert exc.value.code == 64
    with pytest.raises(SystemExit) as exc:
        main(["classify", "--input", str(bad), "--tol-rank", "-1"])
    assert exc.value.code == 64
    assert run(capsys, "geodesic", "--n", 1, "--lambda", 1, "--A", "1", "--B", "1", "--out",
               tmp_path / "g.json")[0] == 64
    nodir = tmp_path / "nope" / "g.json"
    assert run(capsys, "geodesic", "--n", 1, "--lambda", 1, "--A", "1", "--B", "0", "--out", nodir)[0] == 73


def test_coarse_profile_numerical_failure(tmp_path, capsys):
    s = np.linspace(0, 10, 11)
    src = tmp_path / "p.csv"
    write_profile(InvariantProfile(s, np.full((2, 11), 40.0), np.zeros(11)), src)
    assert run(capsys, "synthesize", "--profile", src, "--out", tmp_path / "c.json")[0] == 70


def test_outputs_are_deterministic(tmp_path, capsys, profile2_file):
    outs = []
    for i in range(2):
        c = tmp_path / f"c{i}.json"
        run(capsys, "synthesize", "--profile", profile2_file, "--out", c)
        p = tmp_path / f"p{i}.csv"
        run(capsys, "analyze", "--input", c, "--out-profile", p, "--out-report", tmp_path / f"r{i}.json")
        outs.append((c.read_bytes(), p.read_bytes(), (tmp_path / f"r{i}.json").read_bytes()))
    assert outs[0] == outs[1]


def test_symmetry_file_written(tmp_path, capsys, rng):
    write_symmetry(random_symmetry(1, rng), tmp_path / "s.json")
    assert json.loads((tmp_path / "s.json").read_text())["n"] == 1
