import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from kppmap.domain import CapacityFrame, Field2D, GridSpec, MapMask
from kppmap.io import (GridFormatError, RunConfig, Snapshot, config_to_text, gray_levels,
                       load_frame_manifest, load_grid_file, parse_config_text, read_grid,
                       read_pgm, read_snapshot_csv, write_front_trace, write_grid_file,
                       write_mask_file, write_snapshot_csv, write_snapshot_pgm)
from kppmap.reference import FrontTrace


def test_small_grid(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("2 2 1.0\n0.5 1\n0 0.25\n")
    f = load_grid_file(p, "capacity", time=3.0)
    assert isinstance(f, CapacityFrame) and f.time == 3.0
    assert f.values.tolist() == [[0.5, 1.0], [0.0, 0.25]]
    assert isinstance(load_grid_file(p, "field"), Field2D)


@pytest.mark.parametrize("text, where", [
    ("2 2 1.0\n1 1\n1\n", ":3:"),
    ("2 2 1.0\n1 1\n", ":2:"),
    ("2 2\n1 1\n1 1\n", ":1:"),
    ("2 x 1.0\n1 1\n1 1\n", ":1:"),
    ("2 2 1.0\n1 nan\n1 1\n", ":2:"),
    ("2 2 1.0\n1 1\n1 abc\n", ":3:"),
])
def test_parse_errors_name_the_line(tmp_path, text, where):
    p = tmp_path / "bad.txt"
    p.write_text(text)
    with pytest.raises(GridFormatError, match=where):
        read_grid(p)


def test_mask_values_checked(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("3 1 1.0\n1 0 2\n")
    with pytest.raises(GridFormatError, match="0 or 1"):
        load_grid_file(p, "mask")
    p.write_text("3 1 1.0\n1 0 1\n")
    m = load_grid_file(p, "mask")
    assert isinstance(m, MapMask) and m.habitable.tolist() == [[True, False, True]]


def test_capacity_out_of_range(tmp_path):
    p = tmp_path / "k.txt"
    p.write_text("1 1 1.0\n1.5\n")
    with pytest.raises(GridFormatError):
        load_grid_file(p, "capacity")


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)),
              elements=st.floats(allow_nan=False, allow_infinity=False, width=64)))
def test_grid_roundtrip(tmp_path_factory, a):
    p = tmp_path_factory.mktemp("rt") / "g.txt"
    g = GridSpec(a.shape[1], a.shape[0], 0.1)
    write_grid_file(p, g, a)
    g2, b = read_grid(p)
    assert g2 == g
    np.testing.assert_array_equal(a, b)


def test_mask_file_roundtrip(tmp_path):
    g = GridSpec(4, 2, 1.0)
    m = MapMask(g, [[1, 0, 0, 1], [1, 1, 0, 0]])
    write_mask_file(tmp_path / "m.txt", m)
    assert np.array_equal(load_grid_file(tmp_path / "m.txt", "mask").habitable, m.habitable)


def test_manifest(tmp_path):
    g = GridSpec(2, 1, 1.0)
    (tmp_path / "frames").mkdir()
    write_grid_file(tmp_path / "frames" / "a.txt", g, [[0.5, 1.0]])
    write_grid_file(tmp_path / "frames" / "b.txt", g, [[0.25, 0.5]])
    man = tmp_path / "frames.txt"
    man.write_text("# t path\n0 frames/a.txt\n10.5 frames/b.txt\n")
    frames = load_frame_manifest(man)
    assert [f.time for f in frames] == [0.0, 10.5]
    assert frames[1].values.tolist() == [[0.25, 0.5]]
    man.write_text("10 frames/a.txt\n10 frames/b.txt\n")
    with pytest.raises(GridFormatError, match=":2:"):
        load_frame_manifest(man)


def test_snapshot_csv_roundtrip_and_header(tmp_path):
    g = GridSpec(3, 2, 0.2)
    vals = np.array([[0.1, 1 / 3, 2e-300], [0.0, 1.0, math.pi / 10]])
    snap = Snapshot(1.25, Field2D(g, vals))
    p = tmp_path / "s.csv"
    write_snapshot_csv(snap, p)
    text = p.read_text().splitlines()
    assert text[0] == "# time=1.25 nx=3 ny=2 dx=0.20000000000000001"
    assert text[1].count(",") == 2
    back = read_snapshot_csv(p)
    assert back.time == 1.25
    np.testing.assert_array_equal(back.field.values, vals)


def test_pgm_levels():
    assert gray_levels(0.0) == 0
    assert gray_levels(1.0) == 255
    # round(255 log 6 / log 11) = round(190.5415...)
    assert gray_levels(0.5) == 191
    assert gray_levels(2.0) == 255
    assert gray_levels(-0.1) == 0
    assert gray_levels(0.25, scale=0.5) == 191


def test_pgm_file(tmp_path):
    g = GridSpec(3, 1, 1.0)
    write_snapshot_pgm(Snapshot(0.0, Field2D(g, [[0.0, 0.5, 1.0]])), tmp_path / "s.pgm")
    lines = (tmp_path / "s.pgm").read_text().splitlines()
    assert lines[0] == "P2" and lines[2] == "3 1" and lines[3] == "255"
    assert read_pgm(tmp_path / "s.pgm").tolist() == [[0, 191, 255]]


def test_writers_deterministic(tmp_path):
    g = GridSpec(4, 3, 0.5)
    snap = Snapshot(2.0, Field2D(g, np.random.default_rng(0).random((3, 4))))
    for name in ("a", "b"):
        write_snapshot_csv(snap, tmp_path / f"{name}.csv")
        write_snapshot_pgm(snap, tmp_path / f"{name}.pgm")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.pgm").read_bytes() == (tmp_path / "b.pgm").read_bytes()


def test_front_trace_csv(tmp_path):
    tr = FrontTrace()
    for t, x in [(0.0, 0.0), (1.0, 1.5), (2.0, 3.5), (3.0, 4.0)]:
        tr.append(t, x)
    write_front_trace(tr, tmp_path / "f.csv")
    lines = (tmp_path / "f.csv").read_text().splitlines()
    assert lines == ["t,x_half,velocity", "0,0,", "1,1.5,1.75", "2,3.5,1.25", "3,4,"]


def test_config_parsing():
    d = parse_config_text("scenario = desert\nh = 1/8\nregularize = off\nnx = 51  # cols\n")
    assert d == {"scenario": "desert", "h": 0.125, "regularize": False, "nx": 51}
    with pytest.raises(GridFormatError, match="unknown key"):
        parse_config_text("bogus = 1")
    with pytest.raises(GridFormatError, match=":2:"):
        parse_config_text("h = 1\nbeta = four")
    cfg = RunConfig(**d)
    assert parse_config_text(config_to_text(cfg)) == {
        k: v for k, v in vars(cfg).items() if v is not None}


@pytest.mark.parametrize("changes", [
    dict(t_start=5.0, t_end=5.0), dict(snapshot_every=0.0), dict(h=-1.0), dict(beta=0.5),
    dict(nu=0.0), dict(smooth_L=0), dict(fr=0.0),
])
def test_config_validation(changes):
    with pytest.raises(ValueError):
        RunConfig(scenario="wave1d", **changes).validate()


def test_config_missing_file():
    with pytest.raises(FileNotFoundError):
        RunConfig(scenario="map-run", mask="/nonexistent/mask.txt").validate()
