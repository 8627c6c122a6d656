import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from measurescale import __version__
from measurescale.cli import BETA_SCAN_COLUMNS, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, execute

from conftest import ALPHA_03, LAMBDA_03, S_03, TAPS_03



def run(argv):
    buf = io.StringIO()
    code = execute(argv, stdout=buf)
    return code, buf.getvalue()


def _csv_rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


@pytest.fixture(autouse=True)
def _no_env_dir(monkeypatch):
    monkeypatch.delenv("MEASURESCALE_OUT_DIR", raising=False)


def test_verify_cantor():
    code, text = run(["verify", "--builtin", "cantor3"])
    assert code == EXIT_OK
    line = next(ln for ln in text.splitlines() if ln.startswith("column_isometry_residual"))
    assert float(line.split(":")[1]) < 1e-12
    assert text.rstrip().endswith("OK")


def test_verify_broken_system(tmp_path):
    half = [[0.5, 0.0], [0.0, 0.0], [0.0, 0.0], [0.5, 0.0]]
    path = tmp_path / "broken.json"
    path.write_text(json.dumps({"N": 2, "dim": 2, "label": "broken", "operators": [half, half]}))
    code, text = run(["verify", "--system", str(path)])
    assert code == EXIT_VIOLATION
    line = next(ln for ln in text.splitlines() if ln.startswith("column_isometry_residual"))
    assert float(line.split(":")[1]) == pytest.approx(0.5, abs=1e-15)
    assert "FAIL" in text


def test_measure_loading_broken_system_reports_residual(tmp_path):
    half = [[0.5, 0.0], [0.0, 0.0], [0.0, 0.0], [0.5, 0.0]]
    path = tmp_path / "broken.json"
    path.write_text(json.dumps({"N": 2, "dim": 2, "operators": [half, half]}))
    code, text = run(["measure", "--system", str(path), "--word", "0"])
    assert code == EXIT_VIOLATION
    assert "residual: 0.5" in text


def test_measure_beta03():
    code, text = run(["measure", "--beta", "0.3", "--word", "01"])
    assert code == EXIT_OK
    a0, a1, a2, a3 = TAPS_03
    # F1 F0 e0 with F0 e0 = (a0, a2, 0)
    F1 = np.array([[a3, 0, 0], [a1, -a2, a3], [0, -a0, a1]])
    want = float(np.linalg.norm(F1 @ np.array([a0, a2, 0.0])) ** 2)
    line = next(ln for ln in text.splitlines() if ln.startswith("measure:"))
    assert float(line.split(":")[1]) == pytest.approx(want, abs=1e-14)
    assert "interval: [1/4, 1/2)" in text
    assert "operator:" in text and text.count("  [") == 3


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["verify"],
        ["verify", "--builtin", "cantor3", "--beta", "0.3"],
        ["verify", "--builtin", "nosuch"],
        ["measure", "--builtin", "lebesgue2", "--word", "012"],
        ["measure", "--builtin", "lebesgue2", "--word", "0x"],
        ["beta-scan", "--steps", "1"],
        ["cascade", "--builtin", "cantor3"],
        ["verify", "--system", "/nonexistent/file.json"],
        ["scale", "--builtin", "lebesgue2", "--max-level", "0"],
    ],
)
def test_usage_errors(argv):
    assert run(argv)[0] == EXIT_USAGE


def test_partition_exit_codes(tmp_path):
    code, text = run(["partition", "--beta", "0.3", "--level", "10"])
    assert code == EXIT_OK and float(text.split(":")[1]) < 1e-10
    out = tmp_path / "p.csv"
    code, _ = run(["partition", "--builtin", "lebesgue2", "--level", "3", "--out", str(out)])
    rows = _csv_rows(out.read_text())
    assert code == EXIT_OK and len(rows) == 8
    assert rows[5]["word"] == "101" and float(rows[5]["measure"]) == pytest.approx(0.125)


def test_scale_csv_and_json():
    code, text = run(["scale", "--builtin", "cantor3", "--max-level", "5"])
    assert code == EXIT_OK
    rows = _csv_rows(text)
    assert len(rows) == 5
    for r in rows:
        assert abs(float(r["min_exponent"]) - math.log(2) / math.log(3)) < 1e-10
    code, text = run(["scale", "--beta", "0.3", "--max-level", "4", "--format", "json"])
    obj = json.loads(text)
    assert obj["theoretical_s"] == pytest.approx(S_03, abs=1e-13)
    assert len(obj["levels"]) == 4


def test_spectrum_beta03():
    code, text = run(["spectrum", "--beta", "0.3"])
    assert code == EXIT_OK
    vals = [complex(v.strip()).real for v in text.splitlines()[0].split(":")[1].split(",")]
    np.testing.assert_allclose(vals, [TAPS_03[0], 1 / math.sqrt(2), LAMBDA_03], atol=1e-12)
    assert "region: i" in text and "dominance_ok: True" in text


def test_spectrum_builtin():
    code, text = run(["spectrum", "--builtin", "lebesgue2"])
    assert code == EXIT_OK and text.count("spec(F") == 2


def test_beta_scan_full():
    code, text = run(["beta-scan"])
    assert code == EXIT_OK
    assert text.splitlines()[0].startswith(f"# measurescale {__version__} argv: beta-scan")
    assert text.splitlines()[1] == ",".join(BETA_SCAN_COLUMNS)
    rows = _csv_rows(text)
    assert len(rows) == 629
    assert max(float(r["circle_residual"]) for r in rows) < 1e-12


def test_beta_scan_special_rows():
    _, text = run(["beta-scan", "--from", str(math.pi / 4), "--to", "0.3", "--steps", "2"])
    quarter, b03 = _csv_rows(text)
    assert quarter["region"] == "boundary"
    assert float(quarter["alpha"]) == pytest.approx(0.5, abs=1e-15)
    assert float(quarter["s"]) == pytest.approx(1.0, abs=1e-15)
    assert b03["region"] == "i" and b03["dominance_ok"] == "true"
    assert float(b03["alpha"]) == pytest.approx(ALPHA_03, abs=1e-14)
    assert float(b03["lambda"]) == pytest.approx(LAMBDA_03, abs=1e-14)
    assert float(b03["a0"]) == pytest.approx(TAPS_03[0], abs=1e-15)


def test_beta_scan_reproducible_bytes(tmp_path):
    out = tmp_path / "scan.csv"
    run(["beta-scan", "--steps", "50", "--out", str(out)])
    first = out.read_bytes()
    run(["beta-scan", "--steps", "50", "--out", str(out)])
    assert out.read_bytes() == first


def test_sample_reproducible_and_seeded(tmp_path):
    argv = ["sample", "--builtin", "cantor3", "--length", "10", "--count", "200", "--seed", "4"]
    _, t1 = run(argv)
    _, t2 = run(argv)
    assert t1 == t2
    assert "rng=PCG64" in t1.splitlines()[0]
    words = [r["word"] for r in _csv_rows(t1)]
    assert len(words) == 200 and all("1" not in w for w in words)
    _, t3 = run(argv[:-1] + ["5"])
    assert t3 != t1


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("MEASURESCALE_OUT_DIR", str(tmp_path))
    code, text = run(["beta-scan", "--steps", "3"])
    assert code == EXIT_OK and text == ""
    assert len(_csv_rows((tmp_path / "beta-scan.csv").read_text())) == 3


def test_power_beta03():
    code, text = run(["power", "--beta", "0.3", "--n-max", "60"])
    assert code == EXIT_OK
    assert "rate_envelope: passed=True" in text
    assert "predicted_limit: 1.70835398860049" in text


def test_power_hypothesis_failure():
    code, text = run(["power", "--beta", str(math.pi / 4)])
    assert code == EXIT_VIOLATION and "FAIL" in text


def test_cascade_csv(tmp_path):
    out = tmp_path / "c.csv"
    code, _ = run(["cascade", "--beta", str(5 * math.pi / 12), "--depth", "8", "--out", str(out)])
    assert code == EXIT_OK
    rows = _csv_rows(out.read_text())
    assert len(rows) == 3 * 256 + 1
    h = 2.0**-8
    assert math.fsum(float(r["phi"]) for r in rows) * h == pytest.approx(1.0, abs=1e-10)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "measurescale", "verify", "--builtin", "lebesgue2"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and "OK" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "measurescale", "bogus"], capture_output=True, text=True)
    assert proc.returncode == 1 and "usage" in proc.stderr
