import csv
import io

import numpy as np
import pytest

from rbcom.cli import run


def table(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], np.array([[float(v) for v in r] for r in rows[1:]])


def test_link_loss(capsys):
    assert run(["link-loss", "--L", "5"]) == 0
    out = capsys.readouterr()
    head, data = table(out.out)
    assert head[1] == "delta [1]"
    assert data[0, 1] == pytest.approx(0.9905, abs=1e-4)
    assert "delta" in out.err and out.err.count("\n") == 1


def test_threshold(capsys):
    assert run(["threshold", "--phi", "0.3e-3"]) == 0
    head, data = table(capsys.readouterr().out)
    assert head == ["delta [1]", "pth [W]", "P_in [W]", "alpha_max [1]"]
    assert data[0, 1] == pytest.approx(137.65, abs=0.01)


def test_stable_power(capsys):
    assert run(["stable-power", "--alpha", "0.01"]) == 0
    head, data = table(capsys.readouterr().out)
    lo, hi = data[0, 2], data[0, 3]
    assert lo <= data[0, 1] <= hi


def test_stable_power_infeasible_exits_1(capsys):
    assert run(["stable-power", "--P_in", "50"]) == 1
    err = capsys.readouterr().err
    assert "threshold" in err


def test_optimize_record(capsys, tmp_path):
    out = tmp_path / "opt.csv"
    assert run(["optimize", "--L", "15", "--phi", "0.2e-3", "--r0", "3e-3", "--P_in", "200",
                "--k1", "200", "--k2", "200", "--out", str(out)]) == 0
    head, data = table(out.read_text())
    rec = dict(zip([h.split(" ")[0] for h in head], data[0]))
    assert rec["c_up_star"] == pytest.approx(12.3598, abs=1e-4)
    assert 0 < rec["alpha_star"] < 0.01
    assert all("[" in h for h in head)


def test_optimize_below_threshold(capsys):
    assert run(["optimize", "--P_in", "40", "--k1", "20", "--k2", "20"]) == 0
    out = capsys.readouterr()
    assert "no resonance" in out.err
    _, data = table(out.out)
    assert data[0, 1] == 0.0


def test_sweep_distance_cases(capsys):
    argv = ["sweep", "--var", "L", "--from", "5", "--to", "30", "--count", "26", "--emit", "delta,pth", "--cases", "reference"]
    assert run(argv) == 0
    head, data = table(capsys.readouterr().out)
    assert head == ["r0 [m]", "phi [rad]", "L [m]", "delta [1]", "pth [W]"]
    assert data.shape == (4 * 26, 5)
    for case in data.reshape(4, 26, 5):
        assert np.all(np.diff(case[:, 4]) > 0)
        assert np.all(np.diff(case[:, 3]) < 0)


def test_sweep_pump_power(capsys):
    argv = ["sweep", "--var", "P_in", "--from", "100", "--to", "400", "--count", "7",
            "--emit", "ppeak,cup,clow,alpha", "--phi", "0.3e-3", "--k1", "60", "--k2", "60"]
    assert run(argv) == 0
    _, data = table(capsys.readouterr().out)
    # threshold is 137.65 W for this geometry
    assert data[0, 1] == 0.0 and data[1, 1] > 0.0
    assert np.all(np.diff(data[:, 1]) >= 0)


def test_sweep_log_spacing(capsys):
    assert run(["sweep", "--var", "L", "--from", "1", "--to", "100", "--count", "3", "--log", "--emit", "delta"]) == 0
    _, data = table(capsys.readouterr().out)
    np.testing.assert_allclose(data[:, 0], [1, 10, 100])


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["link-loss", "--nope", "1"],
        ["sweep", "--var", "L", "--from", "30", "--to", "5", "--count", "3", "--emit", "delta"],
        ["sweep", "--var", "L", "--from", "5", "--to", "30", "--count", "1", "--emit", "delta"],
        ["sweep", "--var", "L", "--from", "5", "--to", "30", "--count", "3", "--emit", "nonsense"],
        ["sweep", "--var", "k1", "--from", "5", "--to", "30", "--count", "3", "--emit", "delta"],
        ["threshold", "--eta", "-0.7"],
        ["threshold", "--config", "/nonexistent/file.cfg"],
    ],
)
def test_errors_exit_1(argv, capsys):
    assert run(argv) == 1
    assert capsys.readouterr().err


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("L = 5\nr0 = 5e-3\n")
    assert run(["link-loss", "--config", str(cfg), "--L", "10"]) == 0
    _, data = table(capsys.readouterr().out)
    assert data[0, 0] == 10.0


def test_numerical_failure_exits_2(monkeypatch, capsys):
    from rbcom import cli
    from rbcom.errors import NumericalFailure

    def boom(cfg, args):
        raise NumericalFailure("no convergence", bracket=(1.0, 2.0))

    monkeypatch.setitem(cli.COMMANDS, "threshold", boom)
    assert run(["threshold"]) == 2
    assert "bracket" in capsys.readouterr().err


def test_simulate_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    common = ["simulate", "--k1", "100", "--k2", "100", "--frames", "20", "--slots", "3", "--seed", "4"]
    assert run(common + ["--out", str(a)]) == 0
    assert run(common + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert len(lines) == 1 + 20 * 3
    assert "PCG64" in capsys.readouterr().err


def test_mi_check(capsys):
    assert run(["mi-check", "--k1", "100", "--k2", "100", "--frames", "200", "--slots", "10"]) == 0
    head, data = table(capsys.readouterr().out)
    assert data[0, 0] == 2000
    assert abs(data[0, 2] - data[0, 3]) < 0.05
