"""Command-line interface: exit codes, CSV formats, config handling."""

import filecmp

import numpy as np
import pytest

from lossylab.cli import main


def run(*argv):
    return main(list(argv))


def test_verify_single_photon(capsys, tmp_path):
    out = tmp_path / "checks.csv"
    assert run("verify", "--states", "fock:1", "--out", str(out)) == 0
    text = capsys.readouterr().out
    assert "failed" in text
    lines = text.strip().splitlines()
    summary = lines[-1]
    assert summary.startswith("checks: ")
    assert summary.endswith("0 failed")
    header = out.read_text().splitlines()[0]
    assert header == "check_name,state_id,params,lhs,rhs,margin,tolerance,pass"


def test_verify_suite_selection(capsys):
    assert run("verify", "--states", "fock:0", "--suite", "qcs") == 0
    n_qcs = int(capsys.readouterr().out.split("checks: ")[1].split(" ")[0])
    assert run("verify", "--states", "fock:0") == 0
    n_all = int(capsys.readouterr().out.split("checks: ")[1].split(" ")[0])
    assert 0 < n_qcs < n_all


def test_sweep_single_photon(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    assert run("sweep", "--states", "fock:1", "--grid", "0:1:5",
               "--out", str(out)) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "T,purity,h1,h2,c_squared,mean_n"
    assert len(lines) == 6
    for row in lines[1:]:
        t, pur, h1, h2, c2, mean_n = (float(x) for x in row.split(","))
        assert pur == pytest.approx((1 - t) ** 2 + t ** 2, abs=1e-12)
        assert mean_n == pytest.approx(t, abs=1e-12)
        assert h2 == pytest.approx(-np.log(pur), abs=1e-9)


def test_sweep_squeezed_vacuum(tmp_path):
    out = tmp_path / "sq.csv"
    assert run("sweep", "--states", "squeezed:0.5", "--grid", "0:1:3",
               "--out", str(out)) == 0
    rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
    by_t = {float(r[0]): r for r in rows}
    assert float(by_t[0.5][4]) == pytest.approx(1.0, abs=1e-6)
    assert float(by_t[1.0][4]) == pytest.approx(np.cosh(1.0), abs=1e-4)
    assert float(by_t[1.0][5]) == pytest.approx(np.sinh(0.5) ** 2, abs=1e-4)
    assert float(by_t[0.5][5]) == pytest.approx(0.5 * np.sinh(0.5) ** 2, abs=1e-4)


def test_sweep_rejects_multiple_states():
    assert run("sweep", "--states", "fock:0,fock:1") == 2


def test_phasespace_wigner_of_lossy_photon(tmp_path, capsys):
    out = tmp_path / "grid.csv"
    assert run("phasespace", "--states", "fock:1", "--s", "0", "--T", "0.5",
               "--points", "41", "--half-width", "4", "--out", str(out)) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# s=0.0,T=0.5,state=fock:1")
    assert lines[1] == "re_alpha,im_alpha,value"
    values = np.array([float(line.split(",")[2]) for line in lines[2:]])
    assert values.size == 41 * 41
    # the balanced-loss single photon has a nonnegative distribution
    assert values.min() > -1e-9
    # deeper loss turns the origin negative at the Wigner order
    out2 = tmp_path / "grid2.csv"
    assert run("phasespace", "--states", "fock:1", "--s", "0", "--T", "0.75",
               "--points", "41", "--half-width", "4", "--out", str(out2)) == 0
    values2 = np.array([float(line.split(",")[2])
                        for line in out2.read_text().splitlines()[2:]])
    assert values2.min() == pytest.approx((2 / np.pi) * (1 - 2 * 0.75), abs=1e-6)


def test_conjecture_counterexamples_exit_nonzero(capsys):
    assert run("conjecture", "--name", "unfairness", "--phi", "bell-like") == 1
    text = capsys.readouterr().out
    assert "violation" in text
    assert run("conjecture", "--name", "unfairness", "--phi", "separable-01") == 1
    assert run("conjecture", "--name", "unfairness", "--phi", "no-such-pair") == 2


def test_conjecture_scans_pass_on_random_corpus(capsys, tmp_path):
    out = tmp_path / "scan.csv"
    assert run("conjecture", "--name", "log-convexity", "--states", "random:4",
               "--out", str(out)) == 0
    assert "no-violation-found" in capsys.readouterr().out
    header = out.read_text().splitlines()[0]
    assert header == "conjecture,state_id,T_or_lambda,margin"
    assert run("conjecture", "--name", "unfairness", "--states", "random:3") == 0
    assert run("conjecture", "--name", "ell-log-convexity",
               "--states", "random:3", "--grid", "0.05:0.45:5") == 0
    assert run("conjecture", "--name", "dark-port-g2",
               "--states", "random:3", "--grid", "0:0.5:4") == 0


def test_malformed_arguments_exit_two(capsys):
    assert run("sweep", "--states", "fock:1", "--grid", "0:1") == 2
    assert run("sweep", "--states", "fock:1", "--grid", "0:1:0") == 2
    assert run("verify", "--states", "unknown:3") == 2
    assert run("verify", "--states", "fock:abc") == 2
    with pytest.raises(SystemExit) as info:
        run("no-such-command")
    assert info.value.code == 2


def test_file_state_loading(tmp_path, capsys):
    vec = np.zeros(4)
    vec[1] = 1.0
    path = tmp_path / "one.npy"
    np.save(path, vec)
    out = tmp_path / "file_sweep.csv"
    assert run("sweep", "--states", f"file:{path}", "--grid", "0:1:3",
               "--out", str(out)) == 0
    rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
    by_t = {float(r[0]): r for r in rows}
    assert float(by_t[0.5][1]) == pytest.approx(0.5, abs=1e-12)

    # square matrices load as density operators
    mat = np.diag([0.25, 0.75]).astype(complex)
    mpath = tmp_path / "mixed.npy"
    np.save(mpath, mat)
    assert run("sweep", "--states", f"file:{mpath}", "--grid", "0:1:3",
               "--out", str(tmp_path / "m.csv")) == 0

    # an indefinite matrix needs the explicit escape hatch
    bad = np.diag([2.0 / 3.0, -1.0 / 3.0, 2.0 / 3.0])
    bpath = tmp_path / "indef.npy"
    np.save(bpath, bad)
    assert run("conjecture", "--name", "log-convexity",
               "--states", f"file:{bpath}") == 2
    assert run("conjecture", "--name", "log-convexity",
               "--states", f"file:{bpath}", "--allow-nonpositive") == 0


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep settings\nstates = fock:1\ngrid = 0:1:3\nseed = 3\n")
    out = tmp_path / "cfg_sweep.csv"
    assert run("sweep", "--config", str(cfg), "--out", str(out)) == 0
    assert len(out.read_text().splitlines()) == 4

    # explicit flags win over file values
    out2 = tmp_path / "cfg_sweep2.csv"
    assert run("sweep", "--config", str(cfg), "--grid", "0:1:5",
               "--out", str(out2)) == 0
    assert len(out2.read_text().splitlines()) == 6

    bad = tmp_path / "bad.cfg"
    bad.write_text("no_such_key = 1\n")
    assert run("sweep", "--config", str(bad)) == 2


def test_deterministic_output(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    for path in (a, b):
        assert run("verify", "--states", "random:2", "--seed", "11",
                   "--suite", "purity", "--out", str(path)) == 0
    assert filecmp.cmp(a, b, shallow=False)
