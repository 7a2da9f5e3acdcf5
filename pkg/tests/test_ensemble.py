"""
Tests for the ensemble runner, CSV analysis and markdown report.
"""

import json
import os
from datetime import datetime

import numpy as np
import pandas as pd
import pytest

from analyze_results import export_to_csv, generate_aggregated_tables, load_results_jsonl
from reports.generate_report import generate_report, load_summary
from spectral.config import load_config
from spectral.ensemble import planted_spectrum, run_ensemble, run_instance


@pytest.fixture
def small_config():
    config = load_config()
    config["ensemble"].update({"count": 3, "n_max": 6, "m_max": 3, "seed": 99, "horizon": 512})
    return config


def test_planted_spectrum_is_separated_and_sums_to_n():
    """Planted values are unimodular, spaced and cover n."""
    rng = np.random.Generator(np.random.Philox(3))
    for _ in range(50):
        n = int(rng.integers(2, 12))
        m = int(rng.integers(1, min(4, n) + 1))
        values, multiplicities = planted_spectrum(rng, n, m)
        assert sum(multiplicities) == n
        assert min(multiplicities) >= 1
        assert np.allclose(np.abs(values), 1.0)
        if m > 1:
            gaps = [abs(a - b) for i, a in enumerate(values) for b in values[i + 1:]]
            assert min(gaps) >= 2 * np.sin(np.pi / (2 * m)) - 1e-12


def test_instance_is_reproducible(small_config):
    """One seed gives one instance."""
    settings = small_config["ensemble"]
    first = run_instance("decomposition", 0, 1234, settings, "r")
    second = run_instance("decomposition", 0, 1234, settings, "r")
    assert first["residuals"] == second["residuals"]
    assert first["n"] == second["n"]


def test_run_ensemble_writes_artifacts(small_config, tmp_path):
    """A small run passes and writes JSONL, summary and CSV files."""
    out_dir = str(tmp_path / "run")
    summary = run_ensemble(small_config, "test_run", out_dir)

    records = load_results_jsonl(os.path.join(out_dir, "results.jsonl"))
    assert len(records) == 3 * len(small_config["ensemble"]["kinds"])
    assert all(r["error"] is None for r in records), [r["error"] for r in records if r["error"]]

    for kind, stats in summary["kinds"].items():
        assert stats["count"] == 3
        assert stats["pass_rate"] == 1.0, summary["failures"]

    for name in ("summary.json", "results.csv", "aggregated_kind.csv", "aggregated_kind_n.csv"):
        assert os.path.exists(os.path.join(out_dir, name))

    on_disk = load_summary("test_run", out_dir)
    assert on_disk["total_instances"] == len(records)


def test_defective_instances_are_not_bounded(small_config):
    """Defective instances never diagnose as bounded."""
    record = run_instance("defective", 0, 77, small_config["ensemble"], "r")
    assert record["checks"]["not_bounded"]
    assert record["growth_class"] in ("polynomial", "exponential")


def test_unknown_kind_is_rejected(small_config, tmp_path):
    """Unknown instance kinds are a configuration error."""
    small_config["ensemble"]["kinds"] = ["gelfand", "spiral"]
    with pytest.raises(ValueError):
        run_ensemble(small_config, "bad", str(tmp_path))


def test_csv_flattens_residuals(tmp_path):
    """Residuals and limits become columns; worst ratio is per kind."""
    records = [
        {"run_id": "r", "kind": "gelfand", "index": 0, "seed": 1, "n": 2, "m": 1, "cond": 3.0,
         "residuals": {"gelfand_residual": 0.0}, "limits": {"gelfand_residual": 1e-12},
         "checks": {"value_recovered": True}, "passed": True, "error": None, "elapsed_ms": 1},
        {"run_id": "r", "kind": "whole_spectrum", "index": 0, "seed": 2, "n": 3, "m": 2, "cond": 5.0,
         "residuals": {"identity_residual": 5e-9}, "limits": {"identity_residual": 1e-8},
         "checks": {}, "passed": True, "error": None, "elapsed_ms": 2},
    ]
    df = export_to_csv(records, tmp_path / "results.csv")
    assert "residual.gelfand_residual" in df.columns
    assert "limit.identity_residual" in df.columns

    tables = generate_aggregated_tables(records, str(tmp_path))
    kind_table = pd.read_csv(tmp_path / "aggregated_kind.csv")
    assert set(kind_table["kind"]) == {"gelfand", "whole_spectrum"}
    worst = tables["kind"].set_index("kind")["worst_ratio"]
    assert worst["whole_spectrum"] == pytest.approx(0.5)
    assert worst["gelfand"] == 0.0


def test_markdown_report_lists_failures():
    """Report shows the pass table and each failing residual or check."""
    summary = {
        "run_id": "r1",
        "config": {"seed": 5},
        "total_instances": 2,
        "kinds": {
            "decomposition": {
                "count": 2, "passed": 1, "failed": 1, "pass_rate": 0.5, "errors": 0,
                "residuals": {"planted_error": {"max": 2e-3, "mean": 1e-3, "std": 1e-3}},
            }
        },
        "failures": [
            {"kind": "decomposition", "index": 1, "seed": 42, "n": 5, "m": 2, "cond": 10.0,
             "residuals": {"planted_error": 2e-3}, "limits": {"planted_error": 1e-5},
             "checks": {"cluster_count": False}, "error": None}
        ],
    }
    text = generate_report(summary, generated_at=datetime(2024, 1, 1))
    assert "**Run ID:** r1" in text
    assert "| decomposition | 2 | 1 | 50.0% | 0 |" in text
    assert "planted_error = 2.00e-03 exceeds 1.00e-05" in text
    assert "check cluster_count failed" in text
