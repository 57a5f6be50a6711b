import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from leblond.cli import main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def _write(tmp_path, doc, name="run.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_verify_foundations_json(tmp_path, capsys):
    out = tmp_path / "f.json"
    assert main(["verify-foundations", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["payload"]["relations"]) == 6
    assert all(doc["verdicts"].values())
    assert "PASS" in capsys.readouterr().out


def test_corruption_exits_one(tmp_path):
    assert main(["verify-foundations", "--inject-corruption", "--out", str(tmp_path / "f.json")]) == 1


@pytest.mark.parametrize("doc", [
    {"model": {"variant": "Rashba", "alpha": [0, 0, 1]}, "grid": {"dims": 1, "n": 16, "half_width": 1.0}},
    {"model": {"variant": "Nope"}},
    {"grid": {"dims": 3, "n": 7, "half_width": 1.0}},
    {"model": {"variant": "RadialInverse", "alpha": 0.5},
     "grid": {"dims": 3, "n": 8, "half_width": 1.0, "offset": False}},
    {"solver": {"tol": -1}},
    {"unknown": 1},
])
def test_invalid_config_exits_two(tmp_path, doc):
    assert main(["spectrum", "--config", _write(tmp_path, doc)]) == 2


def test_missing_config_file_exits_two(tmp_path):
    assert main(["spectrum", "--config", str(tmp_path / "absent.json")]) == 2


def test_missing_model_section_exits_two(tmp_path):
    assert main(["spectrum", "--config", _write(tmp_path, {})]) == 2


def test_nonconvergence_exits_three(tmp_path):
    doc = {"model": {"variant": "FreeParticle"}, "grid": {"dims": 3, "n": 8, "half_width": 2.0},
           "solver": {"method": "iterative", "m_levels": 4, "tol": 1e-14, "maxiter": 5}}
    out = tmp_path / "s.json"
    assert main(["spectrum", "--config", _write(tmp_path, doc), "--out", str(out)]) == 3
    assert json.loads(out.read_text())["converged"] is False


def test_rashba_dispersion_csv(tmp_path):
    out = tmp_path / "d.csv"
    assert main(["dispersion", "--config", str(CONFIGS / "rashba.json"), "--format", "csv",
                 "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == ["k1", "k2", "k3", "E_minus", "E_plus"]
    assert len(rows) == 51
    mid = rows[25]
    assert float(mid["k1"]) == pytest.approx(1.0)
    assert float(mid["E_minus"]) == pytest.approx(0.0, abs=1e-14)
    assert float(mid["E_plus"]) == pytest.approx(2.0, abs=1e-14)


def test_dresselhaus_documented_mismatch(tmp_path):
    out = tmp_path / "e.json"
    doc = {"model": {"variant": "Dresselhaus", "alpha": 2.0},
           "grid": {"dims": 3, "n": 16, "half_width": 4.0, "boundary": "periodic", "offset": False}}
    assert main(["equivalence", "--config", _write(tmp_path, doc), "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["payload"]["closed_form"]["verdict"] == "mismatch (documented)"
    assert any("documented finding" in n for n in rep["notes"])


def test_rerun_is_byte_identical(tmp_path):
    doc = {"model": {"variant": "Susy1D", "omega": 1.0}, "grid": {"dims": 1, "n": 256, "half_width": 8.0,
                                                                  "order": 8},
           "solver": {"m_levels": 4}}
    cfg = _write(tmp_path, doc)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert main(["spectrum", "--config", cfg, "--format", "csv", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_seed_override_recorded(tmp_path):
    out = tmp_path / "f.json"
    main(["verify-foundations", "--seed", "7", "--out", str(out)])
    assert json.loads(out.read_text())["config"]["seed"] == 7


def test_susy_and_pair_checks(tmp_path):
    doc = {"model": {"variant": "Susy1D", "omega": 1.0}, "grid": {"dims": 1, "n": 512, "half_width": 8.0,
                                                                  "order": 8},
           "solver": {"m_levels": 5}}
    cfg = _write(tmp_path, doc)
    assert main(["susy-check", "--config", cfg, "--out", str(tmp_path / "s.json")]) == 0
    assert main(["pair-check", "--config", cfg, "--out", str(tmp_path / "p.json")]) == 0


def test_channels_table(tmp_path):
    out = tmp_path / "c.json"
    doc = {"model": {"variant": "RadialOscillator", "alpha": 1.0}, "channels": {"n_points": 2000}}
    assert main(["channels", "--config", _write(tmp_path, doc), "--l-max", "2", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["verdicts"] == {"channel_completeness": True, "oscillator_levels": True}


def test_module_entry_point(tmp_path):
    out = tmp_path / "f.json"
    proc = subprocess.run([sys.executable, "-m", "leblond", "verify-foundations", "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "elapsed" in proc.stderr


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.name)
def test_shipped_configs_validate(path):
    from leblond.config import load_config
    assert load_config(path).model is not None
