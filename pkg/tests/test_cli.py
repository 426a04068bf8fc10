import json
import os
from pathlib import Path

import numpy as np
import pytest

from nonlocal_torus import cli
from nonlocal_torus.errors import ConfigError
from nonlocal_torus.torus_field import TorusGrid, bandlimited_field, write_field

GOLDEN = Path(__file__).parent / "golden"
UPDATE = os.environ.get("NONLOCAL_UPDATE_GOLDEN") == "1"

# case directory -> (command, action, expected exit code)
CASES = {
    "symbol": ("symbol", None, 0),
    "coercivity": ("coercivity", None, 0),
    "solve-const": ("solve-const", None, 0),
    "solve-frozen": ("solve-frozen", None, 0),
    "bootstrap": ("bootstrap", None, 0),
    "plap-identity": ("plap", "identity", 0),
    "plap-certificate": ("plap", "certificate", 0),
    "plap-bootstrap": ("plap", "bootstrap", 0),
    "verify-coercivity": ("verify", "coercivity", 0),
    "verify-caccioppoli": ("verify", "caccioppoli", 0),
    "verify-linfty": ("verify", "linfty", 0),
    "verify-log": ("verify", "log", 0),
    "verify-poincare": ("verify", "poincare", 0),
    "verify-fail": ("verify", "caccioppoli", 2),
    "norms": ("norms", None, 0),
}


def run_case(case, out):
    command, action, _ = CASES[case]
    argv = [command] + ([action] if action else []) + ["--config", str(GOLDEN / case / "config.yaml"),
                                                       "--out", str(out)]
    return cli.main(argv)


def snapshot(out):
    return {p.name: p.read_bytes() for p in sorted(Path(out).iterdir())}


@pytest.mark.parametrize("case", sorted(CASES))
def test_golden_manifest(case, tmp_path):
    code = run_case(case, tmp_path / "a")
    assert code == CASES[case][2]
    manifest = (tmp_path / "a" / "manifest.json").read_text()
    golden = GOLDEN / case / "manifest.json"
    if UPDATE:
        golden.write_text(manifest)
    assert manifest == golden.read_text()
    # every listed artifact hashes to its recorded digest
    import hashlib

    for entry in json.loads(manifest)["artifacts"]:
        data = (tmp_path / "a" / entry["name"]).read_bytes()
        assert hashlib.sha256(data).hexdigest() == entry["sha256"]


@pytest.mark.parametrize("case", ["symbol", "solve-const", "plap-identity", "verify-log", "norms"])
def test_byte_identical_reruns(case, tmp_path):
    run_case(case, tmp_path / "a")
    run_case(case, tmp_path / "b")
    assert snapshot(tmp_path / "a") == snapshot(tmp_path / "b")


def test_symbol_example_row(tmp_path):
    assert run_case("symbol", tmp_path) == 0
    rows = (tmp_path / "symbol.csv").read_text().splitlines()
    row = next(r.split(",") for r in rows[1:] if r.startswith("1,"))
    assert float(row[1]) == pytest.approx(19.739, abs=1e-3)


def test_empty_config_is_config_error(tmp_path, capsys):
    cfg = tmp_path / "empty.yaml"
    cfg.write_text("")
    with pytest.raises(ConfigError):
        cli.load_config(str(cfg), "symbol", None, str(tmp_path), {})
    assert cli.main(["symbol", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert "ConfigError" in capsys.readouterr().err


def test_config_error_reports_field_and_line(tmp_path):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("grid:\n  n: 1\n  N: 48\nkernel: {family: constant}\n")
    c = cli.load_config(str(cfg), "symbol", None, str(tmp_path), {})
    with pytest.raises(ConfigError) as exc:
        c.grid()
    assert exc.value.field == "grid" and exc.value.line == 1
    cfg.write_text("grid: {n: 1, N: 32}\nkernel: {family: constant}\nkmax: many\n")
    c = cli.load_config(str(cfg), "symbol", None, str(tmp_path), {})
    with pytest.raises(ConfigError) as exc:
        c.number("kmax")
    assert exc.value.field == "kmax" and exc.value.line == 3


def test_malformed_yaml_reports_line(tmp_path):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("grid: {n: 1\nkernel: [\n")
    with pytest.raises(ConfigError) as exc:
        cli.load_config(str(cfg), "symbol", None, str(tmp_path), {})
    assert exc.value.line is not None


def test_overrides_and_field_files(tmp_path):
    g = bandlimited_field(TorusGrid(1, 32), 3, 1).zero_mean()
    write_field(g, tmp_path / "g", "g")
    kernel = tmp_path / "k.yaml"
    kernel.write_text("family: constant\nvalue: 2.0\n")
    code = cli.main(["solve-const", "--kernel", str(kernel), "--rhs", str(tmp_path / "g"), "--N", "32",
                     "--s", "0.5", "--out", str(tmp_path / "o")])
    assert code == 0
    report = (tmp_path / "o" / "report.txt").read_text()
    assert "kernel_bound: 2.000000000000e+00" in report
    assert (tmp_path / "o" / "solution.bin").exists()


def test_field_grid_mismatch(tmp_path):
    write_field(bandlimited_field(TorusGrid(1, 16), 3, 1), tmp_path / "g", "g")
    code = cli.main(["solve-const", "--rhs", str(tmp_path / "g"), "--N", "32", "--s", "0.5",
                     "--out", str(tmp_path / "o")])
    assert code == 1


def test_missing_action_is_error(tmp_path):
    assert cli.main(["verify", "--config", str(GOLDEN / "verify-log" / "config.yaml"),
                     "--out", str(tmp_path)]) == 1


def test_thread_cap_does_not_change_output(tmp_path, monkeypatch):
    monkeypatch.setenv("NONLOCAL_THREADS", "1")
    run_case("bootstrap", tmp_path / "one")
    monkeypatch.setenv("NONLOCAL_THREADS", "3")
    run_case("bootstrap", tmp_path / "three")
    assert snapshot(tmp_path / "one") == snapshot(tmp_path / "three")


def test_fmt_fixed():
    assert cli.fmt(1.0) == "1.000000000000e+00"
    assert cli.fmt(np.float64("nan")) == "nan"
    assert cli.fmt(True) == "true" and cli.fmt(np.int64(3)) == "3"
