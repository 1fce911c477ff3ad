"""Deterministic table, metadata, and plot-script writers."""

import json

import numpy as np

import ringlock as rl


def test_format_value_round_trips():
    assert rl.format_value(True) == "true"
    assert rl.format_value(np.bool_(False)) == "false"
    assert rl.format_value(7) == "7"
    assert rl.format_value(np.int64(-3)) == "-3"
    assert rl.format_value(0.1) == "0.1"
    assert float(rl.format_value(1 / 3)) == 1 / 3
    assert rl.format_value(np.float64(2.5)) == "2.5"
    assert rl.format_value("chain") == "chain"


def test_write_table_layout(tmp_path):
    path = str(tmp_path / "t.csv")
    rl.write_table(path, ("a", "b"), [(1, 0.5), (2, True)])
    with open(path, "rb") as handle:
        raw = handle.read()
    assert raw == b"a,b\n1,0.5\n2,true\n"


def test_write_metadata_sorted_and_plain(tmp_path):
    path = str(tmp_path / "m.json")
    rl.write_metadata(
        path,
        {"zeta": np.float64(1.5), "alpha": np.int32(3), "mid": [np.bool_(True)],
         "arr": np.array([1.0, 2.0])},
    )
    with open(path) as handle:
        text = handle.read()
    assert text.endswith("\n")
    assert text.index('"alpha"') < text.index('"arr"') < text.index('"mid"') < text.index('"zeta"')
    data = json.loads(text)
    assert data == {"zeta": 1.5, "alpha": 3, "mid": [True], "arr": [1.0, 2.0]}


def test_writers_are_byte_stable(tmp_path):
    rows = [(1, 0.25, "x"), (2, 1 / 3, "y")]
    a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    rl.write_table(a, ("i", "v", "s"), rows)
    rl.write_table(b, ("i", "v", "s"), rows)
    assert open(a, "rb").read() == open(b, "rb").read()

    ma, mb = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    meta = {"seed": 5, "value": 0.1}
    rl.write_metadata(ma, meta)
    rl.write_metadata(mb, meta)
    assert open(ma, "rb").read() == open(mb, "rb").read()


def test_save_trajectory_shape(tmp_path):
    path = str(tmp_path / "traj.csv")
    times = np.array([0.0, 0.5])
    phases = np.array([[0.0, 1.0, 2.0], [0.1, 1.1, 2.1]])
    rl.save_trajectory(path, times, phases)
    lines = open(path).read().splitlines()
    assert lines[0] == "time,theta0,theta1,theta2"
    assert lines[1] == "0.0,0.0,1.0,2.0"
    assert len(lines) == 3


def test_gnuplot_scripts_reference_their_tables(tmp_path):
    sc = str(tmp_path / "s.gp")
    rl.gnuplot_scatter(sc, str(tmp_path / "s.csv"), 2.0, "demo")
    text = open(sc).read()
    assert '"s.csv"' in text and "using 5:6" in text and "2.0*x" in text

    cv = str(tmp_path / "c.gp")
    rl.gnuplot_convergence(cv, str(tmp_path / "c.csv"), "demo")
    text = open(cv).read()
    assert "logscale xy" in text and "using 1:3" in text and "using 1:5" in text

    tr = str(tmp_path / "t.gp")
    rl.gnuplot_trajectory(tr, str(tmp_path / "t.csv"), 3, "demo")
    text = open(tr).read()
    assert text.count("with lines") == 3 and "using 1:4" in text
