import os
import runpy
from pathlib import Path

import pytest

from felldeform import __version__
from felldeform.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main, make_config
from felldeform.config import (ConfigError, RunConfig, config_from_csv_header, parse_config_text)
from felldeform.report import ScanReport, read_csv, write_atomic

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = ROOT / "tests" / "golden"
load_cases = runpy.run_path(str(ROOT / "scripts" / "regenerate_goldens.py"))["load_cases"]


def run(capsys, *args):
    rc = main(list(args))
    out, err = capsys.readouterr()
    return rc, out, err


def test_verify_sphere_passes(capsys):
    rc, out, _ = run(capsys, "verify", "--model", "sphere", "--theta", "0.3", "--triples", "1")
    assert rc == EXIT_OK
    assert "FAIL" not in out and "checks passed" in out


def test_verify_writes_csv(tmp_path, capsys):
    path = tmp_path / "v.csv"
    rc, _, _ = run(capsys, "verify", "--model", "torus", "--theta", "0.25", "--triples", "1",
                   "--out", str(path))
    assert rc == EXIT_OK
    rep = read_csv(path.read_text())
    assert all(r <= t for r, t in zip(rep["residual"], rep["tolerance"]))


@pytest.mark.parametrize("args", [
    ["verify", "--model", "lens", "--p", "4", "--q", "2"],
    ["verify", "--model", "lens", "--p", "0", "--q", "1"],
    ["verify", "--model", "klein"],
    ["derivative-scan", "--hbar-min", "0", "--log"],
    ["derivative-scan", "--hbar-min", "0.1", "--hbar-max", "0.01"],
    ["derivative-scan", "--grid", "48"],
    ["frobnicate"],
    [],
])
def test_usage_errors(args, capsys):
    rc, _, err = run(capsys, *args)
    assert rc == EXIT_USAGE
    assert "error" in err


def test_lens_rejection_message(capsys):
    _, _, err = run(capsys, "verify", "--model", "lens", "--p", "4", "--q", "2")
    assert "coprime" in err


def test_parse_error_position(capsys):
    rc, _, err = run(capsys, "spectral", "--model", "sphere", "--expr", "Z+Q")
    assert rc == EXIT_USAGE
    assert "unknown symbol Q at position 3" in err


def test_unknown_generator_for_model(capsys):
    rc, _, _ = run(capsys, "derivative-scan", "--model", "torus", "--f", "Z", "--hbar-count", "2")
    assert rc == EXIT_USAGE


def test_spectral_single_row(capsys):
    rc, out, _ = run(capsys, "spectral", "--model", "sphere", "--theta", "0.3",
                     "--expr", "Z*W + W*Z", "--cutoff", "2")
    assert rc == EXIT_OK
    rep = read_csv(out)
    nonzero = [t for t, v in zip(rep["t_1"], rep["fiber_norm"]) if v > 0]
    assert nonzero == [0]


def test_spectral_of_generator(capsys):
    _, out, _ = run(capsys, "spectral", "--model", "torus", "--theta", "0.3", "--expr", "U + 2V",
                    "--cutoff", "2")
    rep = read_csv(out)
    norms = dict(zip(rep["t_1"], rep["fiber_norm"]))
    assert norms[1.0] == pytest.approx(1.0, abs=1e-12)
    assert norms[0.0] == pytest.approx(2.0, abs=1e-12)
    assert norms[-1.0] == 0.0


def test_csv_header_carries_config(capsys):
    _, out, _ = run(capsys, "derivative-scan", "--model", "sphere", "--theta", "0.3",
                    "--hbar-count", "3")
    lines = out.splitlines()
    assert lines[0] == f"# tool = felldeform {__version__}"
    meta = config_from_csv_header(out)
    assert meta["theta"] == 0.3 and meta["hbar_count"] == 3 and meta["model"] == "sphere"
    assert "out" not in meta
    rep = read_csv(out)
    assert rep.names == ["hbar", "residual_l1", "lemma_bound", "residual_over_hbar"]
    assert rep["hbar"] == sorted(rep["hbar"], reverse=True)


def test_header_round_trip(capsys):
    _, out, _ = run(capsys, "commutator-scan", "--model", "torus", "--theta", "0.3",
                    "--hbar-count", "3", "--seed", "7")
    meta = config_from_csv_header(out)
    cfg = RunConfig(**meta).resolved()
    args = ["commutator-scan", "--model", cfg.model, "--theta", repr(cfg.theta),
            "--hbar-count", str(cfg.hbar_count), "--seed", str(cfg.seed)]
    _, again, _ = run(capsys, *args)
    assert again == out


def test_config_file_and_override(tmp_path, capsys):
    cfg_path = tmp_path / "run.cfg"
    cfg_path.write_text("# sample\nmodel = torus\ntheta = 0.25\nhbar-count = 4\n")
    cfg = make_config(["derivative-scan", "--config", str(cfg_path), "--theta", "0.5"])
    assert cfg.model == "torus" and cfg.theta == 0.5 and cfg.hbar_count == 4
    rc, out, _ = run(capsys, "derivative-scan", "--config", str(cfg_path))
    assert rc == EXIT_OK
    assert len(read_csv(out)) == 4


def test_config_rejects_unknown_key(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("modle = torus\n")
    rc, _, err = run(capsys, "verify", "--config", str(bad))
    assert rc == EXIT_USAGE and "modle" in err
    with pytest.raises(ConfigError):
        parse_config_text("theta = abc\n")
    with pytest.raises(ConfigError):
        parse_config_text("theta\n")


def test_missing_config_file(capsys):
    rc, _, _ = run(capsys, "verify", "--config", "/nonexistent/x.cfg")
    assert rc == EXIT_USAGE


def test_field_scan_defaults():
    cfg = make_config(["field-scan"])
    assert (cfg.hbar_min, cfg.hbar_max, cfg.hbar_count, cfg.log) == (0.0, 0.5, 11, False)
    cfg = make_config(["commutator-scan"])
    assert (cfg.hbar_min, cfg.hbar_max, cfg.hbar_count, cfg.log) == (1e-4, 1e-1, 25, True)


def test_field_scan_l1_constant(capsys):
    rc, out, _ = run(capsys, "field-scan", "--model", "torus", "--theta", "0.3", "--grid", "16",
                     "--hbar-count", "3", "--trials", "2")
    assert rc == EXIT_OK
    col = read_csv(out)["l1_norm"]
    assert len(set(col)) == 1


def test_bad_thread_env(monkeypatch, capsys):
    monkeypatch.setenv("FELLDEFORM_THREADS", "many")
    rc, _, err = run(capsys, "spectral", "--expr", "Z")
    assert rc == EXIT_USAGE and "FELLDEFORM_THREADS" in err
    monkeypatch.setenv("FELLDEFORM_THREADS", "0")
    assert main(["spectral", "--expr", "Z"]) == EXIT_USAGE


def test_threads_do_not_change_bytes(monkeypatch, capsys):
    args = ["derivative-scan", "--model", "torus", "--theta", "0.3", "--hbar-count", "4"]
    _, serial, _ = run(capsys, *args)
    monkeypatch.setenv("FELLDEFORM_THREADS", "3")
    _, threaded, _ = run(capsys, *args)
    assert serial == threaded


def test_atomic_write_leaves_no_temp(tmp_path):
    target = tmp_path / "sub" / "a.csv"
    write_atomic(target, "x\n1\n")
    write_atomic(target, "x\n2\n")
    assert target.read_text() == "x\n2\n"
    assert [p.name for p in target.parent.iterdir()] == ["a.csv"]


def test_atomic_write_keeps_old_file_on_failure(tmp_path):
    target = tmp_path / "a.csv"
    target.write_text("old\n")

    class Boom:
        def __str__(self):
            raise RuntimeError

    with pytest.raises(TypeError):
        write_atomic(target, Boom())
    assert target.read_text() == "old\n"
    assert [p.name for p in tmp_path.iterdir()] == ["a.csv"]


def test_report_unequal_columns():
    with pytest.raises(ValueError, match="unequal"):
        ScanReport({"a": [1.0], "b": [1.0, 2.0]})


def test_report_round_trip():
    rep = ScanReport({"x": [0.1, 1 / 3], "y": [1e-300, -2.5]}, {"k": "v"})
    back = read_csv(rep.to_csv())
    assert back.columns == rep.columns and back.metadata == {"k": "v"}


@pytest.mark.parametrize("name, args", load_cases())
def test_golden_bytes(name, args, tmp_path):
    out = tmp_path / name
    assert main([*args, "--out", str(out)]) in (EXIT_OK, EXIT_FAIL)
    assert out.read_bytes() == (GOLDEN / name).read_bytes()


def test_module_entry_point():
    import subprocess
    import sys

    env = dict(os.environ, FELLDEFORM_THREADS="1")
    res = subprocess.run([sys.executable, "-m", "felldeform.cli", "--version"],
                         capture_output=True, text=True, env=env)
    assert res.returncode == 0 and __version__ in res.stdout
