import json
import subprocess
import sys
from pathlib import Path

import pytest

from repi.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def test_entropy_prints_value(capsys):
    assert main(["entropy", "--family", "gaussian", "--sigma", "1", "--p", "2"]) == 0
    out = capsys.readouterr().out
    assert "1.26551" in out


def test_entropy_on_grid(capsys):
    assert main(["entropy", "--family", "laplace", "--scale", "1", "--p", "inf", "--grid", "8192"]) == 0
    assert "H_inf = 0.69315" in capsys.readouterr().out


def test_verify_epi_defaults(capsys):
    assert main(["verify-epi", "--format", "csv"]) == 0
    assert len(capsys.readouterr().out.strip().split("\n")) == 10


def test_violation_exits_one(monkeypatch, capsys):
    from repi import harness
    from repi.report import EpiCheckCell, ExperimentReport

    def fake(cfg, workers=None):
        return ExperimentReport({}, [EpiCheckCell("x", 1.0, 2.0)], {})

    monkeypatch.setattr(harness, "run_sweep", fake)
    assert main(["verify-epi"]) == 1
    assert main(["verify-qepi", "--ensemble", "2"]) == 1
    assert main(["lemma-search", "--random", "2"]) == 1
    assert main(["sweep", "--config", str(CONFIGS / "weighted_gaussian.yaml")]) == 1
    assert '"violation_count": 1' in capsys.readouterr().out


def test_missing_config_exits_two(capsys):
    assert main(["sweep", "--config", "missing.file"]) == 2
    assert "missing.file" in capsys.readouterr().err


def test_bad_config_field_exits_two(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("kind: classical_weighted\npairs: [[gaussian, gaussian]]\np_grid: []\nt_grid: [0.5]\n")
    assert main(["sweep", "--config", str(cfg)]) == 2
    assert "p_grid" in capsys.readouterr().err


def test_unknown_flag_exits_two(capsys):
    with pytest.raises(SystemExit) as info:
        main(["entropy", "--family", "gaussian", "--bogus"])
    assert info.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_young_constant_fraction(capsys):
    assert main(["young-constant", "--p", "2", "--q", "4/3"]) == 0
    assert "0.7698003589" in capsys.readouterr().out


def test_lemma_search(capsys):
    assert main(["lemma-search", "--p", "2", "--a", "0.4", "--format", "csv"]) == 0
    assert main(["lemma-search", "--random", "10", "--format", "csv"]) == 0
    assert main(["lemma-search", "--p", "2"]) == 2


def test_pinf_search_is_exploratory(capsys):
    assert main(["pinf-search", "--n", "1024"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["cells"][0]["passed"] is None
    assert abs(report["cells"][0]["ratio"] - 0.5) < 2e-2


def test_verify_qepi(capsys):
    assert main(["verify-qepi", "--ensemble", "10", "--modes", "1", "2", "--format", "csv"]) == 0
    assert len(capsys.readouterr().out.strip().split("\n")) == 21


def test_convolve_and_thermo(tmp_path, capsys):
    dump = tmp_path / "z.csv"
    assert main(["convolve", "--x", "uniform", "--y", "uniform", "--n", "513", "--dump", str(dump)]) == 0
    out = capsys.readouterr().out
    assert "sup = 1" in out or "sup = 0.99" in out
    assert dump.read_text().startswith("x0,density")
    assert main(["thermo-check"]) == 0


def test_sweep_output_file_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["sweep", "--config", str(CONFIGS / "weighted_gaussian.yaml"), "--output", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert capsys.readouterr().out == ""


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "repi", "young-constant", "--p", "1", "--q", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "C = 1" in proc.stdout
