import json
import subprocess
import sys
from pathlib import Path

import pytest

from credalpac.cli import main

EXAMPLES = Path(__file__).resolve().parent.parent / "configs" / "examples"

SMALL = """\
domain: {inputs: 2, labels: 2}
hypotheses: {all_tables: true}
distribution: [0.5, 0, 0, 0.5]
n: 10
trials: 200
eps_grid: [0.1, 0.3, 0.6]
seed: 4
"""


@pytest.fixture
def small(tmp_path):
    path = tmp_path / "small.yaml"
    path.write_text(SMALL)
    return path


def test_run_json(small, capsys):
    assert main(["run", str(small)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert [r["eps"] for r in doc["rows"]] == [0.1, 0.3, 0.6]
    assert doc["metadata"]["seed"] == 4


def test_run_csv_to_file(small, tmp_path):
    out = tmp_path / "r.csv"
    assert main(["run", str(small), "--format", "csv", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0].startswith("eps,frequency")


def test_seed_override_changes_digest(small, capsys):
    main(["run", str(small)])
    a = json.loads(capsys.readouterr().out)["metadata"]
    main(["run", str(small), "--seed", "5"])
    b = json.loads(capsys.readouterr().out)["metadata"]
    assert b["seed"] == 5 and a["config_digest"] != b["config_digest"]


def test_violation_exit_code(tmp_path):
    gap = EXAMPLES / "credal_gap.yaml"
    assert main(["run", str(gap), "--out", str(tmp_path / "gap.json")]) == 2


def test_validation_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text(SMALL + "bogus: 1\n")
    assert main(["run", str(bad)]) == 1
    assert "line 8, field bogus" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.yaml")]) == 1


def test_bounds(capsys):
    assert main(["bounds", "--class-size", "16", "--delta", "0.05", "--n", "100", "--rademacher", "0.1",
                 "--target-eps", "0.1", "--eps", "0.1", "0.2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["eps_finite_realisable"] == pytest.approx(0.0576832, abs=1e-6)
    assert doc["eps_rademacher"] == pytest.approx(0.671620, abs=1e-6)
    assert doc["sample_complexity_realisable"] == 58
    assert doc["tails"][0]["hoeffding"]["raw_value"] == pytest.approx(0.1353352832366127)


def test_bounds_csv(capsys):
    assert main(["bounds", "--class-size", "4", "--delta", "0.1", "--n", "10", "--eps", "0.1", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "eps,hoeffding,gn_tail,realisable_tail,agnostic_tail" and len(lines) == 2


def test_bounds_bad_delta(capsys):
    assert main(["bounds", "--class-size", "4", "--delta", "2", "--n", "10"]) == 1


def test_rademacher(small, capsys):
    assert main(["rademacher", str(small), "--dataset-draws", "5"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["empirical"]["method"] == "exact" and 0 <= doc["averaged"]["value"] <= 1
    assert main(["rademacher", str(small), "--method", "mc", "--draws", "500", "--dataset-draws", "3"]) == 0
    assert json.loads(capsys.readouterr().out)["averaged"]["method"] == "monte_carlo"


def test_check_realisability(capsys):
    assert main(["check-realisability", str(EXAMPLES / "credal_gap.yaml")]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["credal_realisable"] and not doc["uniform_credal_realisable"]
    assert doc["per_vertex_minimisers"] == [
        {"vertex": 0, "hypothesis": 0, "risk": 0.0},
        {"vertex": 1, "hypothesis": 0, "risk": 1.0},
    ]


def test_module_entry_point(small):
    proc = subprocess.run([sys.executable, "-m", "credalpac", "run", str(small), "--format", "csv"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("eps,")
