import csv
import io
import re

import pytest

from scalegeom import Table, cli, emit_csv
from scalegeom.tables import format_value, render_csv
from scalegeom.verification import REGISTRY


def run(argv):
    return cli.run([str(a) for a in argv])


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def polylines(svg_text):
    out = {}
    for name, pts in re.findall(r'<polyline data-series="([^"]+)"[^>]* points="([^"]*)"', svg_text):
        out[name] = [tuple(map(float, p.split(","))) for p in pts.split()]
    return out


def test_white_example(tmp_path):
    out = tmp_path / "w.csv"
    assert run(["holes", "--kind", "white", "--K", 1, "--r", 1, "--samples", 200, "--out", out]) == 0
    rows = read_rows(out)
    assert rows[0] == ["w", "unscaled", "scaled"] and len(rows) == 201
    assert float(rows[-1][2]) == pytest.approx(0.4, abs=0.05)


def test_black_example(tmp_path):
    out = tmp_path / "b.csv"
    assert run(["holes", "--kind", "black", "--K", 1, "--r", 1, "--samples", 200, "--out", out]) == 0
    rows = read_rows(out)[1:]
    w, _, scaled = min(rows, key=lambda r: abs(float(r[0]) - 0.85))
    assert float(scaled) == pytest.approx(10, rel=0.1)
    assert float(scaled) / float(w) == pytest.approx(12, rel=0.2)
    assert rows[-1][2] == "DIVERGED"


def test_black_svg_has_scaled_above_unscaled(tmp_path):
    svg = tmp_path / "b.svg"
    assert run(["holes", "--kind", "black", "--samples", 100, "--out", tmp_path / "b.csv", "--svg", svg]) == 0
    lines = polylines(svg.read_text())
    assert set(lines) == {"scaled", "unscaled"}
    unscaled = dict(lines["unscaled"])
    origin_x = lines["unscaled"][0][0]
    compared = 0
    for x, y in lines["scaled"]:
        if x > origin_x:
            assert y < unscaled[x]  # SVG y grows downward
            compared += 1
    assert compared > 50


def test_series_selection(tmp_path):
    svg = tmp_path / "c.svg"
    assert run(["cosmo", "--samples", 20, "--out", tmp_path / "c.csv", "--svg", svg, "--series", "factor"]) == 0
    assert set(polylines(svg.read_text())) == {"factor"}


@pytest.mark.parametrize("extra", [
    ["--series", ","],
    ["--series", "nonsense"],
    ["--samples", "1"],
    ["--K", "-1"],
    ["--r", "0"],
    ["--w-max", "1.5"],
    ["--rel-tol", "-1"],
    ["--bogus"],
])
def test_argument_errors_exit_2(tmp_path, extra, capsys):
    argv = ["holes", "--kind", "black", "--out", tmp_path / "x.csv", "--svg", tmp_path / "x.svg", *extra]
    assert run(argv) == 2
    assert "usage" in capsys.readouterr().err
    assert not (tmp_path / "x.csv").exists()


def test_missing_output_directory_is_an_argument_error(tmp_path):
    assert run(["cosmo", "--out", tmp_path / "no" / "such" / "dir.csv"]) == 2


def test_computation_errors_exit_1(tmp_path, capsys):
    out = tmp_path / "g.csv"
    out.write_text("keep\n")
    white = ["geodesic", "--field", "radial", "--K", "-1", "--from", "1,0.3", "--to=-1,0.3", "--out", out]
    assert run(white) == 1
    assert "DomainError" in capsys.readouterr().err
    assert out.read_text() == "keep\n"
    slow = ["geodesic", "--field", "radial", "--K", "1", "--from", "1,0", "--to=-1,0", "--max-iter", "2",
            "--out", tmp_path / "h.csv"]
    assert run(slow) == 1
    assert not (tmp_path / "h.csv").exists()


def test_geodesic_outputs(tmp_path):
    out, hist = tmp_path / "g.csv", tmp_path / "h.csv"
    argv = ["geodesic", "--field", "linear", "--kappa", "1", "--from", "0,0", "--to", "1,0", "--nodes", 8,
            "--out", out, "--history", hist]
    assert run(argv) == 0
    rows = read_rows(out)
    assert rows[0] == ["k", "s", "x1", "x2"] and len(rows) == 10
    assert rows[1] == ["0", "0.0", "0.0", "0.0"] and rows[-1][1:] == ["1.0", "1.0", "0.0"]
    history = read_rows(hist)
    assert history[0] == ["iteration", "objective"]
    values = [float(r[1]) for r in history[1:]]
    assert all(b <= a * (1 + 1e-13) for a, b in zip(values, values[1:]))


def test_dimension_mismatch_is_an_argument_error(tmp_path):
    argv = ["geodesic", "--field", "constant", "--from", "0,0", "--to", "1,0,0", "--out", tmp_path / "g.csv"]
    assert run(argv) == 2


def test_stdout_output(capsys):
    assert run(["cosmo", "--samples", 3, "--out", "-"]) == 0
    text = capsys.readouterr().out
    assert text.splitlines()[0] == "s,lookback_distance,factor"
    assert len(text.splitlines()) == 4


def test_repeated_runs_are_byte_identical(tmp_path):
    blobs = []
    for i in range(2):
        d = tmp_path / str(i)
        d.mkdir()
        assert run(["holes", "--kind", "white", "--samples", 60, "--out", d / "a.csv", "--svg", d / "a.svg"]) == 0
        blobs.append(((d / "a.csv").read_bytes(), (d / "a.svg").read_bytes()))
    assert blobs[0] == blobs[1]


def test_csv_format(tmp_path):
    out = tmp_path / "t.csv"
    emit_csv(Table(("w", "unscaled", "scaled"), [(0.25, 0.25, 0.5), (1.0, 1e-20, float("inf"))]), out)
    raw = out.read_bytes()
    assert raw == b"w,unscaled,scaled\n0.25,0.25,0.5\n1.0,1e-20,DIVERGED\n"
    raw.decode("ascii")
    assert format_value(0.1 + 0.2) == "0.30000000000000004"
    assert render_csv(Table(("a",), [])) == "a\n"


def test_verify_lists_and_runs_every_suite(capsys):
    assert run(["verify", "--list"]) == 0
    names = capsys.readouterr().out.split()
    assert names == list(REGISTRY)
    assert run(["verify", "--suite", "holes.duality", "--suite", "cosmology.boundary"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert [l.split()[0] for l in lines] == ["PASS", "PASS"]
    assert run(["verify", "--suite", "no.such"]) == 2


def test_verify_all(capsys):
    assert run(["verify"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == len(REGISTRY)
    assert all(l.startswith("PASS ") for l in lines)
