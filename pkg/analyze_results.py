#!/usr/bin/env python3
"""
Analyze ensemble results and export to CSV.
"""

import json
import argparse
import os
import pandas as pd


def load_results_jsonl(jsonl_path):
    """Load ensemble records from JSONL file."""
    results = []
    with open(jsonl_path, 'r') as f:
        for line in f:
            if line.strip():
                results.append(json.loads(line))
    return results


def flatten_record(result):
    """One CSV row per instance; residuals and limits become prefixed columns."""
    error = result.get("error")
    row = {
        "run_id": result.get("run_id", ""),
        "kind": result.get("kind", ""),
        "index": result.get("index", 0),
        "seed": str(result.get("seed", "")),
        "n": result.get("n"),
        "m": result.get("m"),
        "cond": result.get("cond"),
        "passed": bool(result.get("passed", False)),
        "elapsed_ms": result.get("elapsed_ms", 0),
        "error": error.get("type", "") if isinstance(error, dict) else (error or ""),
        "growth_class": result.get("growth_class", ""),
    }
    for name, value in (result.get("residuals") or {}).items():
        row[f"residual.{name}"] = value
    for name, value in (result.get("limits") or {}).items():
        row[f"limit.{name}"] = value
    for name, value in (result.get("checks") or {}).items():
        row[f"check.{name}"] = bool(value)
    return row


def export_to_csv(results, output_path):
    """Export ensemble records to CSV."""
    df = pd.DataFrame([flatten_record(r) for r in results])
    df.to_csv(output_path, index=False)
    return df


def generate_aggregated_tables(results, output_dir):
    """Per-kind and per-kind×n pass rates and residual statistics."""
    df = pd.DataFrame([flatten_record(r) for r in results])
    if df.empty:
        return {}

    residual_cols = sorted(c for c in df.columns if c.startswith("residual."))
    ratios = [
        df[col] / df["limit." + col[len("residual."):]]
        for col in residual_cols
        if "limit." + col[len("residual."):] in df.columns
    ]
    df["worst_ratio"] = pd.concat(ratios, axis=1).max(axis=1).fillna(0.0) if ratios else 0.0

    kind_agg = df.groupby("kind").agg(
        count=("passed", "size"),
        passed=("passed", "sum"),
        pass_rate=("passed", "mean"),
        worst_ratio=("worst_ratio", "max"),
        mean_elapsed_ms=("elapsed_ms", "mean"),
    ).reset_index()
    kind_agg.to_csv(os.path.join(output_dir, "aggregated_kind.csv"), index=False)

    kind_n_agg = df.groupby(["kind", "n"]).agg(
        count=("passed", "size"),
        pass_rate=("passed", "mean"),
        worst_ratio=("worst_ratio", "max"),
    ).reset_index()
    kind_n_agg.to_csv(os.path.join(output_dir, "aggregated_kind_n.csv"), index=False)

    tables = {"kind": kind_agg, "kind_n": kind_n_agg}
    if residual_cols:
        melted = df.melt(id_vars=["kind"], value_vars=residual_cols, var_name="residual", value_name="value")
        melted = melted.dropna(subset=["value"])
        residual_agg = melted.groupby(["kind", "residual"])["value"].agg(["mean", "std", "max"]).reset_index()
        residual_agg.to_csv(os.path.join(output_dir, "aggregated_residuals.csv"), index=False)
        tables["residuals"] = residual_agg

    return tables


def main():
    parser = argparse.ArgumentParser(
        description="Analyze ensemble results and export to CSV"
    )
    parser.add_argument(
        "--run_id",
        type=str,
        required=True,
        help="Run ID to analyze"
    )
    parser.add_argument(
        "--results_dir",
        type=str,
        default=None,
        help="Results directory (default: data/runs/<run_id>)"
    )

    args = parser.parse_args()

    if args.results_dir:
        results_dir = args.results_dir
    else:
        results_dir = os.path.join("data", "runs", args.run_id)

    jsonl_path = os.path.join(results_dir, "results.jsonl")
    if not os.path.exists(jsonl_path):
        print(f"❌ No results file found in {results_dir}")
        return 2

    print(f"📊 Loading results from: {jsonl_path}")
    results = load_results_jsonl(jsonl_path)
    print(f"   Loaded {len(results)} result records")

    csv_path = os.path.join(results_dir, "results.csv")
    print(f"\n📝 Exporting to CSV: {csv_path}")
    df = export_to_csv(results, csv_path)
    print(f"   Exported {len(df)} rows to CSV")

    print(f"\n📊 Generating aggregated tables...")
    tables = generate_aggregated_tables(results, results_dir)
    for name in tables:
        print(f"   - aggregated_{name}.csv")

    print(f"\n✅ Analysis complete!")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
