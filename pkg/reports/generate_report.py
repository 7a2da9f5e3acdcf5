#!/usr/bin/env python3
"""
Generate human-readable report from an ensemble run.
"""

import json
import argparse
import os
from datetime import datetime


def load_summary(run_id, results_dir=None):
    """Load summary.json of a run, or None if missing."""
    if results_dir is None:
        results_dir = os.path.join("data", "runs", run_id)

    summary_path = os.path.join(results_dir, "summary.json")
    if not os.path.exists(summary_path):
        return None
    with open(summary_path, 'r') as f:
        return json.load(f)


def _sci(value):
    return "n/a" if value is None else f"{value:.2e}"


def generate_report(summary, generated_at=None):
    """Generate markdown report."""
    generated_at = generated_at or datetime.now()
    config = summary.get("config", {})
    report = []

    report.append("# Spectral Lab - Ensemble Report\n")
    report.append(f"**Generated:** {generated_at.strftime('%Y-%m-%d %H:%M:%S')}\n")
    report.append(f"**Run ID:** {summary.get('run_id', 'N/A')}\n")
    report.append(f"**Seed:** {config.get('seed', 'N/A')}\n")
    report.append(f"**Total Instances:** {summary.get('total_instances', 0)}\n")

    report.append("\n---\n")

    report.append("## Pass Rates\n")
    report.append("| Kind | Instances | Passed | Pass Rate | Errors |")
    report.append("|------|-----------|--------|-----------|--------|")
    for kind, data in summary.get("kinds", {}).items():
        report.append(
            f"| {kind} | {data['count']} | {data['passed']} | "
            f"{data['pass_rate']:.1%} | {data['errors']} |"
        )

    report.append("\n---\n")

    report.append("## Worst Residuals\n")
    for kind, data in summary.get("kinds", {}).items():
        residuals = data.get("residuals", {})
        if not residuals:
            continue
        report.append(f"### {kind}\n")
        report.append("| Residual | Max | Mean | Std Dev |")
        report.append("|----------|-----|------|---------|")
        for name, stats in residuals.items():
            report.append(
                f"| {name} | {_sci(stats['max'])} | {_sci(stats['mean'])} | {_sci(stats['std'])} |"
            )
        report.append("")

    report.append("\n---\n")

    report.append("## Failing Instances\n")
    failures = summary.get("failures", [])
    if not failures:
        report.append("All instances passed.\n")
    for failure in failures:
        report.append(
            f"- **{failure['kind']}** #{failure['index']} (seed {failure['seed']}, n={failure.get('n')})"
        )
        if failure.get("error"):
            error = failure["error"]
            report.append(f"  - error: {error.get('type')}: {error.get('message')}")
            continue
        limits = failure.get("limits") or {}
        for name, value in (failure.get("residuals") or {}).items():
            limit = limits.get(name)
            if limit is not None and value > limit:
                report.append(f"  - {name} = {_sci(value)} exceeds {_sci(limit)}")
        for name, ok in (failure.get("checks") or {}).items():
            if not ok:
                report.append(f"  - check {name} failed")

    return "\n".join(report) + "\n"


def main():
    parser = argparse.ArgumentParser(
        description="Generate ensemble report"
    )
    parser.add_argument(
        "--run_id",
        type=str,
        required=True,
        help="Run ID to generate report for"
    )
    parser.add_argument(
        "--results_dir",
        type=str,
        default=None,
        help="Results directory (default: data/runs/<run_id>)"
    )
    parser.add_argument(
        "--output",
        type=str,
        default=None,
        help="Output file path (default: <results_dir>/report.md)"
    )

    args = parser.parse_args()

    summary = load_summary(args.run_id, args.results_dir)
    if not summary:
        print(f"❌ Summary not found for run: {args.run_id}")
        return 2

    report = generate_report(summary)

    if args.output:
        output_path = args.output
    else:
        results_dir = args.results_dir or os.path.join("data", "runs", args.run_id)
        output_path = os.path.join(results_dir, "report.md")

    os.makedirs(os.path.dirname(os.path.abspath(output_path)), exist_ok=True)
    with open(output_path, 'w') as f:
        f.write(report)

    print(f"✅ Report generated: {output_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
