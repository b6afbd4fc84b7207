import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from halfloop.cli import main
from halfloop.fixtures import GOLDEN_DIR

MODELS = Path(__file__).resolve().parent.parent / "models"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_passes_and_writes_json(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify", MODELS / "inner_n2_N2_L2.model", "--all-pairs", "--json", path)
    assert code == 0 and out.rstrip().endswith("status: pass")
    d = json.loads(path.read_text())
    assert d["status"] == "pass" and d["model"]["kind"] == "inner-gaudin"
    assert all("time_ms" in c for c in d["checks"])


def test_reports_byte_identical_without_timings(capsys, tmp_path):
    outs = []
    for k in range(2):
        p = tmp_path / f"{k}.json"
        code, out, _ = run(capsys, "verify", MODELS / "dunkl_n2_L2.model", "--seed", 3, "--no-timings", "--format", "json", "--json", p)
        assert code == 0
        assert out == p.read_text()
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["model"]["seed"] == 3


def test_verify_exit_code_nonzero_on_failure(capsys):
    code, out, _ = run(capsys, "verify", MODELS / "dunkl_n3_L2.model")
    assert code == 1
    assert "FAIL fixtures/fixture I2" in out and "PASS fixtures/fixture I1" in out


def test_truncation_override(capsys):
    code, out, _ = run(capsys, "verify", MODELS / "dunkl_n2_L2_N2.model", "--truncation", 1, "--no-timings")
    assert code == 0
    assert "truncation = 1" in out and "B^(2)" not in out


def test_neighbour_pairs_by_default(capsys):
    _, out, _ = run(capsys, "verify", MODELS / "dunkl_n1_L3.model", "--no-timings")
    assert "[d1,d2]=0" in out and "[d1,d3]=0" not in out
    _, out, _ = run(capsys, "verify", MODELS / "dunkl_n1_L3.model", "--no-timings", "--all-pairs")
    assert "[d1,d3]=0" in out


def test_model_errors_exit_two(capsys, tmp_path):
    bad = tmp_path / "bad.model"
    bad.write_text("kind = inner-gaudin\nn = 2\nN = 2\nmultiplicities = 1, 1\nz = 1, 2\ncolour = red\n")
    code, _, err = run(capsys, "verify", bad)
    assert code == 2 and f"{bad}:6:1: unknown key 'colour'" in err
    bad.write_text("kind = outer-gaudin\nN = 3\neta = -1\nz = 1, 2\n")
    code, _, err = run(capsys, "verify", bad)
    assert code == 2 and "eta-even-N" in err and "N must be even" in err
    code, _, err = run(capsys, "verify", tmp_path / "missing.model")
    assert code == 2


def test_spectra(capsys):
    code, out, _ = run(capsys, "spectra", MODELS / "inner_n2_N2_L3.model", "--seed", 4, "--tol", 1e-9)
    assert code == 0 and "PASS simultaneous diagonalization" in out and "note: H3 spectrum:" in out
    code, _, err = run(capsys, "spectra", MODELS / "dunkl_n2_L2.model")
    assert code == 2 and "gaudin-only" in err


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "compare", MODELS / "outer_so21_L2.model")
    assert code == 0 and out.split() == ["H1:", "match", "H2:", "match"]
    code, out, _ = run(capsys, "oracle", "hamiltonians", MODELS / "classic_N2_L2.model")
    H = json.loads(out)
    assert H["H1"][1][2] == "-1" and H["H2"][1][2] == "1"


def test_fixtures_refuse_overwrite(capsys, tmp_path):
    for p in GOLDEN_DIR.glob("*.golden"):
        shutil.copy(p, tmp_path / p.name)
    before = {p.name: p.read_text() for p in tmp_path.iterdir()}
    code, _, err = run(capsys, "fixtures", "--dir", tmp_path)
    assert code == 2 and "refusing to overwrite" in err
    assert {p.name: p.read_text() for p in tmp_path.iterdir()} == before


def test_console_script_entry_point():
    exe = shutil.which("halfloop")
    cmd = [exe] if exe else [sys.executable, "-m", "halfloop.cli"]
    r = subprocess.run(cmd + ["--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("halfloop ")
    r = subprocess.run(cmd + ["oracle", "compare", str(MODELS / "inner_spin1.model")], capture_output=True, text=True)
    assert r.returncode == 0


def test_no_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
