import json
import math
import subprocess
import sys

from vdexplore import gauss_math
from vdexplore.cli import main
from vdexplore.verify import run_verify


def test_verify_passes_and_writes_report(tmp_path, capsys):
    assert main(["verify", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "verify_report.txt").read_text().splitlines()
    assert lines[0].split("\t") == ["name", "measured", "tolerance", "status"]
    assert all(line.endswith("PASS") for line in lines[1:])
    assert sum("density_ratio_identity" in line for line in lines) == 15


def test_loosened_erf_fails_sigma_check(tmp_path):
    with gauss_math.erf_override(lambda x: round(math.erf(x), 7)):
        checks, ok = run_verify(tmp_path / "r.txt")
    assert not ok
    failed = {c.name for c in checks if not c.passed}
    assert any(n.startswith("sigma_closed_vs_numeric") for n in failed)


def test_config_errors_exit_2(tmp_path, capsys):
    assert main(["bandit", "--config", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"bogus": 1}))
    assert main(["entropy", "--config", str(bad)]) == 2
    assert "unknown keys" in capsys.readouterr().err


def test_bandit_with_overrides(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"iterations": 20, "batch_size": 8, "stages": [[1, 20, 0.0, 1.0]]}))
    out = tmp_path / "out"
    assert main(["bandit", "--config", str(cfg), "--seeds", "3,1", "--out", str(out)]) == 0
    rows = (out / "bandit_trace.csv").read_text().splitlines()
    assert len(rows) == 1 + 2 * 2 * 20
    assert rows[1].startswith("1,1,VPG,")


def test_converge_sweep_cli(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"convergence": {"iterations": 5, "batch_size": 100}}))
    assert main(["converge-sweep", "--config", str(cfg), "--seeds", "0", "--d-list", "1,2",
                 "--out", str(tmp_path)]) == 0
    assert len((tmp_path / "convergence_sweep.csv").read_text().splitlines()) == 3


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "vdexplore", "entropy", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and (tmp_path / "entropy.csv").exists()
    proc = subprocess.run([sys.executable, "-m", "vdexplore", "bandit", "--seeds", "x"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
