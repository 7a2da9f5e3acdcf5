#!/usr/bin/env python3
"""
Spectral Lab - Riesz projections and power-bounded operators
Command-line front end: reads a matrix file, runs one analysis, and writes a
deterministic JSON report to standard output.

Exit codes: 0 success, 1 a check failed (selftest, or certify --strict),
2 input error, 3 numerical error.
"""

import argparse
import hashlib
import os
import sys
import tempfile
from datetime import datetime
from pathlib import Path

import numpy as np

from spectral.complexmat import norm_fro
from spectral.config import default_gap, load_config
from spectral.decompose import (
    NOT_DECOMPOSABLE,
    certify,
    gelfand_check,
    power_identity_residuals,
    spectral_decomposition,
)
from spectral.errors import InvalidMatrixError, MatrixFileError, SpectralError
from spectral.matrix_file import file_digest, load_matrix, matrix_json, write_matrix
from spectral.powerbound import (
    POLYNOMIAL,
    diagnose,
    gen_defective,
    gen_power_bounded,
    power_profile,
)
from spectral.riesz import Contour, complement, eigenspace, enclosed_value, riesz_projection, verify_kr
from spectral.serialize import dumps, make_report
from spectral.spectrum import spectrum_report, unimodularity_check

EXIT_OK = 0
EXIT_FINDING = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

INVOLUTION = np.array([[5, -2], [12, -5]], dtype=complex)
JORDAN_BLOCK = np.array([[1, 1], [0, 1]], dtype=complex)
GOLDEN_FILES = {"involution": "involution.json", "jordan_block": "jordan_block.json"}


def parse_complex(text):
    """Parse '1', '-1', '0.5+2j', 'i', '1-i' (unicode minus allowed)."""
    cleaned = text.strip().replace("−", "-").replace(" ", "")
    if cleaned.endswith("i"):
        cleaned = cleaned[:-1] + "j"
    if cleaned in ("j", "+j", "-j"):
        cleaned = cleaned.replace("j", "1j")
    try:
        return complex(cleaned)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}")


def parse_complex_list(text):
    return [parse_complex(part) for part in text.split(",") if part.strip()]


def parse_int_list(text):
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}")


def parse_seed(text):
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def cluster_record(c):
    return {
        "center": c.center,
        "members": c.members,
        "multiplicity": c.multiplicity,
        "separation": c.separation,
        "spread": c.spread,
    }


def projection_record(p):
    return {
        "value": p.value,
        "matrix": p.matrix,
        "trace": p.trace,
        "idem_residual": p.idem_residual,
        "contour": {"center": p.contour.center, "radius": p.contour.radius, "nodes": p.contour.nodes},
    }


def kr_record(kr):
    return {
        "eigen_residual": kr.eigen_residual,
        "range_invariance_residual": kr.range_invariance_residual,
        "kernel_invariance_residual": kr.kernel_invariance_residual,
        "direct_sum_residual": kr.direct_sum_residual,
        "commutation_residual": kr.commutation_residual,
        "restricted_residual": kr.restricted_residual,
        "range_dim": kr.range_dim,
        "complement_dim": kr.complement_dim,
        "ambiguous": kr.ambiguous,
        "passed": kr.passed,
    }


def effective(args, config, name):
    value = getattr(args, name, None)
    return config[name] if value is None else value


def resolve_gap(args, config, T):
    return args.gap if args.gap is not None else default_gap(norm_fro(T), config)


def cmd_spectrum(args, config):
    T, digest = load_matrix(args.file)
    gap = resolve_gap(args, config, T)
    tol = effective(args, config, "tol")
    report = spectrum_report(T, gap, args.max_sweeps)
    passed, deviation = unimodularity_check(report, tol)
    results = {
        "eigenvalues": report.eigenvalues,
        "clusters": [cluster_record(c) for c in report.clusters],
        "unimodular": {"passed": passed, "max_deviation": deviation},
    }
    parameters = {"gap": gap, "tol": tol, "max_sweeps": args.max_sweeps or 30 * T.shape[0]}
    verdict = "unimodular" if passed else "not-unimodular"
    return make_report("spectrum", digest, parameters, results, {"unimodular_deviation": deviation}, verdict), EXIT_OK


def decomposition_parameters(args, config, T):
    return {
        "gap": resolve_gap(args, config, T),
        "nodes": effective(args, config, "nodes"),
        "tol": effective(args, config, "tol"),
        "pivot_tol": config["pivot_tol"],
        "rank_tol": config["rank_tol"],
        "workers": effective(args, config, "workers"),
    }


def cmd_decompose(args, config):
    T, digest = load_matrix(args.file)
    params = decomposition_parameters(args, config, T)
    bundle = spectral_decomposition(T, **params)
    results = {
        "clusters": [cluster_record(c) for c in bundle.report.clusters],
        "projections": [projection_record(p) for p in bundle.projections],
        "kr": [kr_record(kr) for kr in bundle.kr_reports],
    }
    residuals = {
        "resolution_residual": bundle.resolution_residual,
        "orthogonality_residual": bundle.orthogonality_residual,
        "reconstruction_residual": bundle.reconstruction_residual,
        "commutation_residual": bundle.commutation_residual,
        "pair_idempotence_residual": bundle.pair_idempotence_residual,
    }
    return make_report("decompose", digest, params, results, residuals), EXIT_OK


def cmd_certify(args, config):
    T, digest = load_matrix(args.file)
    params = decomposition_parameters(args, config, T)
    cert = certify(T, **params)
    results = {
        "values": cert.bundle.values,
        "projections": [projection_record(p) for p in cert.bundle.projections],
        "lagrange": cert.lagrange,
        "threshold": cert.threshold,
        "power_bounded": cert.power_bounded,
        "power_identities": power_identity_residuals(T, cert.bundle),
    }
    params["strict"] = args.strict
    code = EXIT_FINDING if args.strict and cert.verdict == NOT_DECOMPOSABLE else EXIT_OK
    return make_report("certify", digest, params, results, cert.residuals(), cert.verdict), code


def cmd_powerbound(args, config):
    T, digest = load_matrix(args.file)
    params = {
        "horizon": effective(args, config, "horizon"),
        "norm_iters": config["norm_iters"],
        "growth_tol": effective(args, config, "growth_tol"),
        "semilog_slope_tol": config["semilog_slope_tol"],
        "polynomial_slope_min": config["polynomial_slope_min"],
    }
    profile = power_profile(T, params["horizon"], params["norm_iters"], config["pivot_tol"])
    verdict = diagnose(profile, params["growth_tol"], params["semilog_slope_tol"], params["polynomial_slope_min"])
    results = {
        "profile": {
            "exponents": profile.exponents,
            "norms": profile.norms,
            "sup_observed": profile.sup_observed,
            "escaped": profile.escaped,
        },
        "bounded": verdict.bounded,
        "growth_class": verdict.growth_class,
        "degree": verdict.degree,
        "rate": verdict.rate,
        "evidence": verdict.evidence,
    }
    residuals = {"sup_observed": profile.sup_observed}
    return make_report("powerbound", digest, params, results, residuals, verdict.growth_class), EXIT_OK


def cmd_project(args, config):
    T, digest = load_matrix(args.file)
    params = {
        "center": args.center,
        "radius": args.radius,
        "nodes": effective(args, config, "nodes"),
        "tol": effective(args, config, "tol"),
        "pivot_tol": config["pivot_tol"],
        "rank_tol": config["rank_tol"],
    }
    contour = Contour(center=args.center, radius=args.radius, nodes=params["nodes"])
    P = riesz_projection(T, contour, pivot_tol=params["pivot_tol"], workers=effective(args, config, "workers"))
    value = enclosed_value(T, P)
    kr = verify_kr(T, value, P, params["tol"], params["rank_tol"])
    B = eigenspace(P, params["rank_tol"])
    L = complement(P, params["rank_tol"])
    results = {
        "value": value,
        "matrix": P.matrix,
        "trace": P.trace,
        "rank": B.rank,
        "complement_rank": L.rank,
        "eigenspace": B.columns,
        "ambiguous": B.ambiguous or L.ambiguous,
        "kr": kr_record(kr),
    }
    residuals = {
        "idem_residual": P.idem_residual,
        "eigen_residual": kr.eigen_residual,
        "range_invariance_residual": kr.range_invariance_residual,
        "kernel_invariance_residual": kr.kernel_invariance_residual,
        "direct_sum_residual": kr.direct_sum_residual,
    }
    return make_report("project", digest, params, results, residuals), EXIT_OK


def cmd_generate(args, config):
    cond_cap = effective(args, config, "cond_cap")
    params = {
        "kind": args.kind,
        "n": args.n,
        "values": args.values,
        "multiplicities": args.multiplicities,
        "cond_cap": cond_cap,
        "seed": args.seed,
        "format": args.format,
    }
    out = Path(args.out)
    truth_path = out.with_name(out.name + ".truth.json")
    if args.kind == "power-bounded":
        T, truth = gen_power_bounded(args.n, args.values, args.multiplicities, cond_cap, args.seed)
        sidecar = {
            "V": truth.V,
            "diagonal": truth.diagonal,
            "values": truth.values,
            "multiplicities": truth.multiplicities,
            "projections": truth.projections,
            "cond": truth.cond,
            "seed": truth.seed,
        }
    else:
        if len(args.values) != 1:
            raise ValueError("a defective operator takes exactly one value")
        T = gen_defective(args.n, args.values[0], args.seed, cond_cap)
        sidecar = {"value": args.values[0], "jordan_size": args.n, "seed": args.seed}
    write_matrix(T, out, args.format)
    truth_path.write_text(dumps(sidecar))
    digest = file_digest(out.read_bytes())
    results = {
        "matrix_path": str(out),
        "truth_path": str(truth_path),
        "matrix_digest": digest,
        "n": args.n,
    }
    return make_report("generate", digest, params, results, {}), EXIT_OK


def write_golden_files(directory):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / GOLDEN_FILES["involution"]).write_text(matrix_json(INVOLUTION))
    (directory / GOLDEN_FILES["jordan_block"]).write_text(matrix_json(JORDAN_BLOCK))


def _angle_defect(basis_columns, direction):
    u = np.asarray(direction, dtype=complex)
    u = u / np.linalg.norm(u)
    b = basis_columns[:, 0]
    return float(1.0 - abs(np.vdot(b, u)) / np.linalg.norm(b))


def run_golden_checks(directory, tol_override=None):
    """Checks on the two worked examples, read back through the file layer."""
    A, digest_i = load_matrix(Path(directory) / GOLDEN_FILES["involution"])
    J, digest_j = load_matrix(Path(directory) / GOLDEN_FILES["jordan_block"])

    def limit(default):
        return default if tol_override is None else tol_override

    checks = []

    def check(name, value, bound):
        checks.append({"name": name, "value": value, "limit": bound, "passed": bool(value <= bound)})

    cert = certify(A)
    bundle = cert.bundle
    eigs = sorted(bundle.report.eigenvalues, key=lambda z: z.real)
    check("involution.eigenvalues", max(abs(eigs[0] + 1), abs(eigs[1] - 1)), limit(1e-8))
    expected = {1.0: np.array([[3, -1], [6, -2]]), -1.0: np.array([[-2, 1], [-6, 3]])}
    directions = {1.0: [1, 2], -1.0: [1, 3]}
    for p in bundle.projections:
        key = 1.0 if p.value.real > 0 else -1.0
        label = "plus" if key > 0 else "minus"
        check(f"involution.projection_{label}", float(np.max(np.abs(p.matrix - expected[key]))), limit(1e-8))
        check(f"involution.eigenspace_{label}", _angle_defect(eigenspace(p).columns, directions[key]), limit(1e-8))
    check("involution.lagrange_agreement", cert.lagrange_agreement, limit(1e-10))
    check("involution.algebraic_residual", cert.algebraic_residual, limit(1e-12))
    check("involution.reconstruction_residual", cert.reconstruction_residual, limit(1e-8))

    verdict = diagnose(power_profile(J, horizon=1024))
    degree = verdict.degree if verdict.growth_class == POLYNOMIAL else float("inf")
    check("jordan.growth_degree", abs(degree - 1.0), limit(0.1))
    jordan_cert = certify(J)
    check("jordan.not_decomposable", 0.0 if jordan_cert.verdict == NOT_DECOMPOSABLE else 1.0, limit(0.5))
    check("jordan.gelfand_residual", abs(gelfand_check(J).gelfand_residual - 1.0), limit(1e-12))

    digest = hashlib.sha256((digest_i + digest_j).encode()).hexdigest()
    return checks, digest


def cmd_selftest(args, config):
    print(f"\n{'='*60}", file=sys.stderr)
    print("Self-test: worked examples", file=sys.stderr)
    print(f"{'='*60}", file=sys.stderr)

    if args.golden_dir:
        checks, digest = run_golden_checks(args.golden_dir, args.tol)
    else:
        with tempfile.TemporaryDirectory() as tmp:
            write_golden_files(tmp)
            checks, digest = run_golden_checks(tmp, args.tol)

    for c in checks:
        marker = "✅" if c["passed"] else "❌"
        print(f"  {marker} {c['name']}: {c['value']:.3e} (limit {c['limit']:.1e})", file=sys.stderr)

    failed = [c["name"] for c in checks if not c["passed"]]
    if failed:
        print(f"\n❌ Failed checks: {', '.join(failed)}", file=sys.stderr)
    else:
        print("\n✅ All checks passed", file=sys.stderr)

    params = {"golden_dir": args.golden_dir, "tol": args.tol}
    results = {"checks": checks, "failed": failed}
    residuals = {c["name"]: c["value"] for c in checks}
    verdict = "fail" if failed else "pass"
    return make_report("selftest", digest, params, results, residuals, verdict), EXIT_FINDING if failed else EXIT_OK


def cmd_ensemble(args, config):
    from spectral.ensemble import run_ensemble

    ensemble = config["ensemble"]
    if args.kinds:
        ensemble["kinds"] = [k.strip() for k in args.kinds.split(",") if k.strip()]
    if args.count is not None:
        ensemble["count"] = args.count
    if args.seed is not None:
        ensemble["seed"] = args.seed

    run_id = args.run_id or datetime.now().strftime("%Y%m%d_%H%M%S")
    out_dir = args.out_dir or os.path.join("data", "runs", run_id)
    summary = run_ensemble(config, run_id, out_dir)
    failed = sum(k["failed"] for k in summary["kinds"].values())
    residuals = {f"{kind}.pass_rate": stats["pass_rate"] for kind, stats in summary["kinds"].items()}
    params = {"run_id": run_id, "out_dir": out_dir, **ensemble}
    digest = file_digest(dumps(ensemble).encode())
    report = make_report("ensemble", digest, params, summary, residuals, "pass" if failed == 0 else "fail")
    return report, EXIT_OK if failed == 0 else EXIT_FINDING


def add_decomposition_flags(sub):
    sub.add_argument("--gap", type=float, default=None, help="Cluster gap (default: gap_factor*max(1, ||A||_F))")
    sub.add_argument("--nodes", type=int, default=None, help="Quadrature nodes per contour")
    sub.add_argument("--tol", type=float, default=None, help="Residual tolerance (scaled by max(1, ||T||_F))")
    sub.add_argument("--workers", type=int, default=None, help="Threads for per-cluster projections")


def build_parser():
    parser = argparse.ArgumentParser(
        description="Riesz projections, spectral decomposition and power-boundedness diagnostics"
    )
    parser.add_argument("--config", type=str, default=None, help="Path to configuration JSON file")
    subparsers = parser.add_subparsers(dest="command", required=True)

    sub = subparsers.add_parser("spectrum", help="Eigenvalues, clusters and unimodularity")
    sub.add_argument("file")
    sub.add_argument("--gap", type=float, default=None)
    sub.add_argument("--tol", type=float, default=None)
    sub.add_argument("--max-sweeps", dest="max_sweeps", type=int, default=None)
    sub.set_defaults(handler=cmd_spectrum)

    sub = subparsers.add_parser("decompose", help="Riesz projection per spectral cluster")
    sub.add_argument("file")
    add_decomposition_flags(sub)
    sub.set_defaults(handler=cmd_decompose)

    sub = subparsers.add_parser("certify", help="Decomposition, Lagrange and algebraic certificate")
    sub.add_argument("file")
    add_decomposition_flags(sub)
    sub.add_argument("--strict", action="store_true", help="Exit 1 when the verdict is not-decomposable")
    sub.set_defaults(handler=cmd_certify)

    sub = subparsers.add_parser("powerbound", help="Profile of ||T^n|| and growth classification")
    sub.add_argument("file")
    sub.add_argument("--horizon", type=int, default=None)
    sub.add_argument("--growth-tol", dest="growth_tol", type=float, default=None)
    sub.set_defaults(handler=cmd_powerbound)

    sub = subparsers.add_parser("project", help="Riesz projection on a given circle")
    sub.add_argument("file")
    sub.add_argument("--center", type=parse_complex, required=True)
    sub.add_argument("--radius", type=float, required=True)
    sub.add_argument("--nodes", type=int, default=None)
    sub.add_argument("--tol", type=float, default=None)
    sub.add_argument("--workers", type=int, default=None)
    sub.set_defaults(handler=cmd_project)

    sub = subparsers.add_parser("generate", help="Write a generated test operator and its ground truth")
    sub.add_argument("--kind", choices=["power-bounded", "defective"], required=True)
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--values", type=parse_complex_list, required=True)
    sub.add_argument("--multiplicities", type=parse_int_list, default=None)
    sub.add_argument("--cond-cap", dest="cond_cap", type=float, default=None)
    sub.add_argument("--seed", type=parse_seed, default=0)
    sub.add_argument("--out", type=str, required=True)
    sub.add_argument("--format", choices=["json", "matrix-market"], default="json")
    sub.set_defaults(handler=cmd_generate)

    sub = subparsers.add_parser("selftest", help="Run the worked examples end to end")
    sub.add_argument("--golden-dir", dest="golden_dir", type=str, default=None)
    sub.add_argument("--tol", type=float, default=None, help="Override every check limit")
    sub.set_defaults(handler=cmd_selftest)

    sub = subparsers.add_parser("ensemble", help="Run the generated property suites")
    sub.add_argument("--run_id", type=str, default=None)
    sub.add_argument("--out_dir", type=str, default=None)
    sub.add_argument("--kinds", type=str, default=None, help="Comma-separated kinds to run")
    sub.add_argument("--count", type=int, default=None)
    sub.add_argument("--seed", type=parse_seed, default=None)
    sub.set_defaults(handler=cmd_ensemble)

    return parser


def emit_error(exc, stream=None):
    stream = stream or sys.stderr
    if isinstance(exc, SpectralError):
        payload = exc.details()
    else:
        payload = {"type": type(exc).__name__, "message": str(exc)}
    stream.write(dumps({"error": payload}))


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config)
        report, code = args.handler(args, config)
    except (MatrixFileError, InvalidMatrixError) as exc:
        emit_error(exc)
        return EXIT_INPUT
    except SpectralError as exc:
        emit_error(exc)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        emit_error(exc)
        return EXIT_INPUT

    sys.stdout.write(dumps(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
