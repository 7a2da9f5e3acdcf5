"""
Configuration loading: JSON file merged over built-in defaults.
"""

import copy
import json
from pathlib import Path
from typing import Any, Dict, Optional

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / "configs" / "run_config.json"

DEFAULTS: Dict[str, Any] = {
    "gap_factor": 1e-6,
    "nodes": 64,
    "tol": 1e-8,
    "horizon": 256,
    "pivot_tol": 1e-13,
    "rank_tol": 1e-10,
    "growth_tol": 1.5,
    "semilog_slope_tol": 0.01,
    "polynomial_slope_min": 0.5,
    "norm_iters": 100,
    "cond_cap": 100.0,
    "workers": 1,
    "ensemble": {
        "kinds": ["gelfand", "decomposition", "whole_spectrum", "defective"],
        "count": 50,
        "n_max": 16,
        "m_max": 4,
        "cond_cap": 100.0,
        "seed": 20240601,
        "tol_scale": 1e-6,
        "nodes": 64,
        "horizon": 1024,
        "gelfand_tol": 1e-12,
        "unimodular_tol": 1e-10,
        "whole_spectrum_tol": 1e-8,
        "whole_spectrum_radius": 2.0,
    },
}


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(config_path: Optional[str] = None) -> Dict[str, Any]:
    """Load configuration from JSON; missing keys fall back to DEFAULTS.

    With no path, the repository's configs/run_config.json is used if present.
    """
    path = Path(config_path) if config_path else DEFAULT_CONFIG_PATH
    if config_path is None and not path.exists():
        return copy.deepcopy(DEFAULTS)
    with open(path, "r") as f:
        config = json.load(f)
    return _merge(DEFAULTS, config)


def default_gap(frobenius_norm: float, config: Optional[Dict[str, Any]] = None) -> float:
    """gap = gap_factor·max(1, ‖A‖_F)."""
    factor = (config or DEFAULTS).get("gap_factor", DEFAULTS["gap_factor"])
    return factor * max(1.0, frobenius_norm)
