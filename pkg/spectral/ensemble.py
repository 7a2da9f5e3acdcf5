"""
Labeled property suites run as an experiment: generated operators with known
ground truth, one record per instance in results.jsonl, and a per-kind
summary.json.
"""

import json
import os
import sys
import time
from typing import Any, Dict, List, Tuple

import numpy as np

from spectral.complexmat import EPS, norm_fro
from spectral.decompose import certify, gelfand_check
from spectral.errors import SpectralError
from spectral.powerbound import diagnose, gen_defective, gen_power_bounded, power_profile, spawn_seeds
from spectral.riesz import Contour, riesz_projection
from spectral.serialize import dumps, to_jsonable
from spectral.spectrum import spectrum_report, unimodularity_check

KINDS = ("gelfand", "decomposition", "whole_spectrum", "defective")
DEFECTIVE_N_MAX = 4


def _log(message=""):
    print(message, file=sys.stderr)


def planted_spectrum(rng: np.random.Generator, n: int, m: int) -> Tuple[List[complex], List[int]]:
    """m unimodular values at least π/m apart in angle, multiplicities summing to n."""
    spacing = 2 * np.pi / m
    offset = rng.uniform(0, 2 * np.pi)
    angles = offset + spacing * (np.arange(m) + rng.uniform(-0.25, 0.25, size=m))
    values = [complex(np.exp(1j * a)) for a in angles]
    cuts = np.sort(rng.choice(np.arange(1, n), size=m - 1, replace=False)) if m > 1 else np.array([], dtype=int)
    bounds = np.concatenate([[0], cuts, [n]])
    return values, [int(b - a) for a, b in zip(bounds[:-1], bounds[1:])]


def _match_projections(bundle, truth) -> float:
    """Largest ‖P_j − P_j^true‖_F, pairing each planted value with the nearest computed one."""
    worst = 0.0
    for value, expected in zip(truth.values, truth.projections):
        nearest = min(bundle.projections, key=lambda p: abs(p.value - value))
        worst = max(worst, norm_fro(nearest.matrix - expected))
    return worst


def run_gelfand(rng, seed, settings) -> Dict[str, Any]:
    n = int(rng.integers(1, settings["n_max"] + 1))
    value = complex(np.exp(1j * rng.uniform(0, 2 * np.pi)))
    T, truth = gen_power_bounded(n, [value], [n], settings["cond_cap"], seed)
    report = gelfand_check(T)
    return {
        "n": n,
        "m": 1,
        "cond": truth.cond,
        "residuals": {
            "gelfand_residual": report.gelfand_residual,
            "unimodular_deviation": report.unimodular_deviation,
        },
        "limits": {
            "gelfand_residual": settings["gelfand_tol"],
            "unimodular_deviation": settings["unimodular_tol"],
        },
        "checks": {"value_recovered": abs(report.value - value) <= settings["unimodular_tol"]},
    }


def run_decomposition(rng, seed, settings) -> Dict[str, Any]:
    n = int(rng.integers(2, settings["n_max"] + 1))
    m = int(rng.integers(2, min(settings["m_max"], n) + 1))
    values, multiplicities = planted_spectrum(rng, n, m)
    T, truth = gen_power_bounded(n, values, multiplicities, settings["cond_cap"], seed)
    cert = certify(T, nodes=settings["nodes"])
    bundle = cert.bundle
    kr_worst = max(
        max(kr.eigen_residual, kr.range_invariance_residual, kr.kernel_invariance_residual, kr.direct_sum_residual)
        for kr in bundle.kr_reports
    )
    residuals = {
        "resolution_residual": bundle.resolution_residual,
        "orthogonality_residual": bundle.orthogonality_residual,
        "reconstruction_residual": bundle.reconstruction_residual,
        "commutation_residual": bundle.commutation_residual,
        "algebraic_residual": cert.algebraic_residual,
        "lagrange_agreement": cert.lagrange_agreement,
        "kr_residual": kr_worst,
        "planted_error": _match_projections(bundle, truth),
    }
    limit = settings["tol_scale"] * truth.cond
    dims = sorted(kr.range_dim for kr in bundle.kr_reports)
    return {
        "n": n,
        "m": m,
        "cond": truth.cond,
        "residuals": residuals,
        "limits": {name: limit for name in residuals},
        "checks": {
            "cluster_count": len(bundle.projections) == m,
            "eigenspace_dims": dims == sorted(multiplicities),
        },
    }


def run_whole_spectrum(rng, seed, settings) -> Dict[str, Any]:
    n = int(rng.integers(2, settings["n_max"] + 1))
    m = int(rng.integers(1, min(settings["m_max"], n) + 1))
    values, multiplicities = planted_spectrum(rng, n, m)
    T, truth = gen_power_bounded(n, values, multiplicities, settings["cond_cap"], seed)
    contour = Contour(center=0j, radius=settings["whole_spectrum_radius"], nodes=settings["nodes"])
    P = riesz_projection(T, contour)
    residual = norm_fro(P.matrix - np.eye(n))
    return {
        "n": n,
        "m": m,
        "cond": truth.cond,
        "residuals": {"identity_residual": residual},
        "limits": {"identity_residual": settings["whole_spectrum_tol"]},
        "checks": {},
    }


def run_defective(rng, seed, settings) -> Dict[str, Any]:
    n = int(rng.integers(2, min(settings["n_max"], DEFECTIVE_N_MAX) + 1))
    value = complex(np.exp(1j * rng.uniform(0, 2 * np.pi)))
    T = gen_defective(n, value, seed, settings["cond_cap"])
    verdict = diagnose(power_profile(T, settings["horizon"]))
    # a Jordan block of size n moves its eigenvalue by about (perturbation)^(1/n)
    unimodular_limit = 10 * (settings["cond_cap"] * EPS * max(1.0, norm_fro(T))) ** (1.0 / n)
    _, deviation = unimodularity_check(spectrum_report(T))
    return {
        "n": n,
        "m": 1,
        "cond": None,
        "residuals": {"unimodular_deviation": deviation},
        "limits": {"unimodular_deviation": unimodular_limit},
        "checks": {"not_bounded": not verdict.bounded},
        "growth_class": verdict.growth_class,
        "degree": verdict.degree,
    }


RUNNERS = {
    "gelfand": run_gelfand,
    "decomposition": run_decomposition,
    "whole_spectrum": run_whole_spectrum,
    "defective": run_defective,
}


def run_instance(kind: str, index: int, seed: int, settings: Dict[str, Any], run_id: str) -> Dict[str, Any]:
    """Generate and check one instance; library errors are recorded, not raised."""
    param_seed, matrix_seed = spawn_seeds(seed, 2)
    rng = np.random.Generator(np.random.Philox(param_seed))
    record: Dict[str, Any] = {"run_id": run_id, "kind": kind, "index": index, "seed": seed, "error": None}
    start = time.perf_counter()
    try:
        outcome = RUNNERS[kind](rng, matrix_seed, settings)
    except SpectralError as exc:
        record.update({"passed": False, "error": exc.details()})
    else:
        within = all(outcome["residuals"][k] <= v for k, v in outcome["limits"].items())
        record.update(outcome)
        record["passed"] = bool(within and all(outcome["checks"].values()))
    record["elapsed_ms"] = int((time.perf_counter() - start) * 1000)
    return record


def generate_summary(records: List[Dict[str, Any]], run_id: str, settings: Dict[str, Any]) -> Dict[str, Any]:
    summary: Dict[str, Any] = {
        "run_id": run_id,
        "config": settings,
        "total_instances": len(records),
        "kinds": {},
        "failures": [],
    }
    for kind in settings["kinds"]:
        subset = [r for r in records if r["kind"] == kind]
        if not subset:
            continue
        passed = sum(1 for r in subset if r["passed"])
        names = sorted({name for r in subset for name in r.get("residuals", {})})
        residual_stats = {}
        for name in names:
            values = np.array([r["residuals"][name] for r in subset if name in r.get("residuals", {})])
            residual_stats[name] = {
                "max": float(values.max()),
                "mean": float(values.mean()),
                "std": float(values.std(ddof=1)) if values.size > 1 else 0.0,
            }
        summary["kinds"][kind] = {
            "count": len(subset),
            "passed": passed,
            "failed": len(subset) - passed,
            "pass_rate": passed / len(subset),
            "errors": sum(1 for r in subset if r["error"]),
            "residuals": residual_stats,
        }
    summary["failures"] = [
        {k: r.get(k) for k in ("kind", "index", "seed", "n", "m", "cond", "residuals", "limits", "checks", "error")}
        for r in records
        if not r["passed"]
    ]
    return summary


def run_ensemble(config: Dict[str, Any], run_id: str, out_dir: str) -> Dict[str, Any]:
    """Run every configured kind; writes results.jsonl, summary.json and the CSV tables."""
    from analyze_results import export_to_csv, generate_aggregated_tables

    settings = config["ensemble"]
    unknown = [k for k in settings["kinds"] if k not in RUNNERS]
    if unknown:
        raise ValueError(f"unknown ensemble kinds: {', '.join(unknown)}")

    os.makedirs(out_dir, exist_ok=True)
    results_jsonl_path = os.path.join(out_dir, "results.jsonl")
    open(results_jsonl_path, "w").close()

    _log(f"\n{'='*60}")
    _log(f"Starting Ensemble Run: {run_id}")
    _log(f"{'='*60}")
    _log(f"Kinds: {', '.join(settings['kinds'])}")
    _log(f"Instances per kind: {settings['count']}")
    _log(f"Seed: {settings['seed']}")
    _log(f"Output directory: {out_dir}")
    _log(f"{'='*60}\n")

    records = []
    kind_seeds = spawn_seeds(settings["seed"], len(settings["kinds"]))
    for kind, kind_seed in zip(settings["kinds"], kind_seeds):
        _log(f"\n🔍 Kind: {kind}")
        for index, seed in enumerate(spawn_seeds(kind_seed, settings["count"])):
            record = run_instance(kind, index, seed, settings, run_id)
            marker = "✅" if record["passed"] else "❌"
            _log(f"  {marker} [{index + 1}/{settings['count']}] n={record.get('n')} seed={seed}")
            records.append(record)
            with open(results_jsonl_path, "a") as f:
                f.write(json.dumps(to_jsonable(record), sort_keys=True) + "\n")

    summary = generate_summary(records, run_id, settings)
    summary_path = os.path.join(out_dir, "summary.json")
    with open(summary_path, "w") as f:
        f.write(dumps(summary))

    csv_path = os.path.join(out_dir, "results.csv")
    export_to_csv(records, csv_path)
    generate_aggregated_tables(records, out_dir)

    _log(f"\n✅ Ensemble complete!")
    _log(f"   Results: {results_jsonl_path}")
    _log(f"   Summary: {summary_path}")
    _log(f"   CSV:     {csv_path}")
    return summary
