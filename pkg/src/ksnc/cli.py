"""Command-line front end.

Exit codes: 0 affirmative verdict, 1 negative verdict, 2 error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from . import cabello, noise
from .colorability import (
    DEFAULT_ENUMERATION_LIMIT,
    EnumerationLimitError,
    NormalizationMode,
    find_coloring,
    prove_uncolourable,
)
from .document import DocumentError, HypergraphDocument, load_document
from .hypergraph import KSHypergraph
from .polytope import EmptyPolytopeError, bound_by_selection_oracle, enumerate_vertices, noncontextual_bound
from .quantum import DEFAULT_TOL, ideal_quantum_A, validate_realization

EXIT_YES, EXIT_NO, EXIT_ERROR = 0, 1, 2
WORKERS_ENV = "KSNC_WORKERS"
MARGINAL = 1e-3


class CommandError(Exception):
    pass


def fmt(x: Any) -> Any:
    """JSON-ready value: exact rationals become "num/den" strings."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {k: fmt(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [fmt(v) for v in x]
    return x


def _workers() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise CommandError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise CommandError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
    return n


def _load(path: str) -> tuple[HypergraphDocument, KSHypergraph, str]:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc.strerror}") from None
    digest = hashlib.sha256(raw).hexdigest()
    try:
        doc = load_document(path)
        return doc, doc.hypergraph(), digest
    except DocumentError as exc:
        raise CommandError(f"{path}: {exc}") from None


def _report(command: str, path: str, digest: str, results: dict, timings: dict) -> dict:
    return {"command": command, "input": path, "input_sha256": digest, "results": results, "timings": timings}


def _node_values(values) -> list:
    return [fmt(Fraction(v)) for v in values]


def cmd_check_color(args) -> tuple[dict, int]:
    doc, h, digest = _load(args.file)
    mode = NormalizationMode(args.mode)
    t0 = time.perf_counter()
    cert = prove_uncolourable(h, mode)
    elapsed = time.perf_counter() - t0
    results: dict[str, Any] = {
        "mode": mode.value,
        "verdict": "uncolourable" if cert.conclusion else "colorable",
        "certificate": {
            "exhaustive": cert.conclusion,
            "nodes_explored": cert.nodes_explored,
            "max_extendable_size": cert.max_extendable_size,
            "max_extendable": list(cert.max_extendable),
        },
    }
    if not cert.conclusion:
        results["witness"] = list(find_coloring(h, mode))
    return _report("check-color", args.file, digest, results, {"search_s": elapsed}), (
        EXIT_NO if cert.conclusion else EXIT_YES
    )


def cmd_bound(args) -> tuple[dict, int]:
    doc, h, digest = _load(args.file)
    timings = {}
    t0 = time.perf_counter()
    vs = enumerate_vertices(h)
    timings["vertex_enumeration_s"] = time.perf_counter() - t0
    if not vs.vertices:
        results = {"polytope": "empty", "vertex_count": 0, "complete": vs.complete}
        return _report("bound", args.file, digest, results, timings), EXIT_NO
    rep = noncontextual_bound(h, vs)
    results: dict[str, Any] = {
        "polytope": "nonempty",
        "bound": fmt(rep.bound),
        "witness": _node_values(rep.witness),
        "per_context_max": _node_values(rep.per_context_max),
        "vertex_count": len(vs),
        "complete": vs.complete,
    }
    code = EXIT_YES
    if args.oracle:
        t0 = time.perf_counter()
        oracle = bound_by_selection_oracle(h, workers=_workers())
        timings["selection_oracle_s"] = time.perf_counter() - t0
        results["oracle_bound"] = fmt(oracle)
        results["agreement"] = oracle == rep.bound
        if oracle != rep.bound:
            code = EXIT_ERROR
    return _report("bound", args.file, digest, results, timings), code


def _derived_bound(h: KSHypergraph) -> Fraction | None:
    try:
        return noncontextual_bound(h).bound
    except EmptyPolytopeError:
        return None


def cmd_quantum(args) -> tuple[dict, int]:
    doc, h, digest = _load(args.file)
    r = doc.realization(h)
    if r is None:
        raise CommandError(f"{args.file}: document has no rays")
    t0 = time.perf_counter()
    report = validate_realization(h, r, args.tol)
    results: dict[str, Any] = {
        "backend": "exact" if r.exact else "float",
        "valid": report.valid,
        "orthogonality_failures": [[loc, dev] for loc, dev in report.orthogonality_failures],
        "completeness_failures": [[loc, dev] for loc, dev in report.completeness_failures],
        "equivalence_failures": [[loc, dev] for loc, dev in report.equivalence_failures],
    }
    if not report.valid:
        return _report("quantum", args.file, digest, results, {"total_s": time.perf_counter() - t0}), EXIT_ERROR
    a = ideal_quantum_A(h, r, args.tol)
    bound = _derived_bound(h)
    results["quantum_A"] = fmt(a)
    results["bound"] = fmt(bound)
    code = EXIT_NO
    if bound is None:
        results["verdict"] = "empty polytope: no noncontextual model exists"
        code = EXIT_YES
    elif bound >= 1:
        results["verdict"] = "no violation possible"
    elif a > bound:
        results["verdict"] = f"violates bound {bound}"
        code = EXIT_YES
    else:
        results["verdict"] = f"does not violate bound {bound}"
    return _report("quantum", args.file, digest, results, {"total_s": time.perf_counter() - t0}), code


def _probability(text: str) -> Fraction:
    # Fraction("0.9") is exact, so threshold comparisons involve no rounding.
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"{text} is outside [0, 1]")
    return value


def _grid(text: str) -> list[float]:
    try:
        start, stop, step = (float(x) for x in text.split(":"))
        return noise.frange(start, stop, step)
    except ValueError:
        raise argparse.ArgumentTypeError(f"sweep must be START:STOP:STEP, got {text!r}") from None


def _uniform_size(h: KSHypergraph) -> int:
    sizes = set(h.context_sizes)
    if len(sizes) != 1:
        raise CommandError(f"noise analysis needs equal context sizes, got {sorted(sizes)}")
    return sizes.pop()


def cmd_noise(args) -> tuple[dict | None, int]:
    doc, h, digest = _load(args.file)
    m = _uniform_size(h)
    r = doc.realization(h)
    if args.trials is not None and r is None:
        raise CommandError("Monte-Carlo estimates need a document with rays")
    if r is not None and r.dimension != m:
        raise CommandError(f"rays of dimension {r.dimension} for {m}-outcome measurements")

    if args.sweep is not None:
        rows = noise.sweep(args.sweep, args.sweep, m, h, r, args.trials, args.seed)
        if args.csv:
            with open(args.csv, "w", newline="") as out:
                noise.write_sweep_csv(rows, out)
        else:
            noise.write_sweep_csv(rows, sys.stdout)
            return None, EXIT_YES
        results = {"sweep_rows": len(rows), "csv": args.csv}
        return _report("noise", args.file, digest, results, {}), EXIT_YES

    if args.p1 is None or args.p2 is None:
        raise CommandError("give --p1 and --p2, or --sweep")
    t0 = time.perf_counter()
    bound = _derived_bound(h)
    if bound is None:
        raise CommandError("the assignment polytope is empty")
    params = noise.DepolarizingParams(args.p1, args.p2)
    a = noise.a_depolarizing(params, m, m)
    product = params.p1 * params.p2
    results: dict[str, Any] = {
        "p1": fmt(args.p1),
        "p2": fmt(args.p2),
        "A_closed_form": fmt(a),
        "bound": fmt(bound),
    }
    try:
        threshold = noise.violation_threshold(bound, m)
    except ValueError as exc:
        results["threshold"] = None
        results["above_threshold"] = "n/a: " + str(exc)
        code = EXIT_NO
    else:
        above = product > threshold
        results["threshold"] = fmt(threshold)
        verdict = "yes" if above else "no"
        if abs(float(product) - float(threshold)) < MARGINAL:
            verdict += " (marginal)"
        results["above_threshold"] = verdict
        code = EXIT_YES if above else EXIT_NO
    if args.trials is not None:
        sample = noise.simulate_experiment(h, r, params, args.trials, args.seed)
        results["monte_carlo"] = {
            "trials_per_pair": args.trials,
            "seed": args.seed,
            "A_empirical": sample.a_hat(),
            "standard_error": sample.standard_error(),
        }
    return _report("noise", args.file, digest, results, {"total_s": time.perf_counter() - t0}), code


def cmd_compare_cabello(args) -> tuple[dict, int]:
    doc, h, digest = _load(args.file)
    f = cabello.ParityFunctional.from_hypergraph(h)
    t0 = time.perf_counter()
    try:
        scan = cabello.scan(h, f, args.limit)
    except EnumerationLimitError as exc:
        raise CommandError(f"refusing exhaustive scan: {exc}") from None
    from .colorability import satisfies

    unnormalized = all(not satisfies(h, w, NormalizationMode.EXACTLY_ONE) for w in scan["maximizers"])
    samples = {
        "uniform": cabello.trivial_statistics(h.context_sizes),
        "one_hot": [[Fraction(int(k == 0)) for k in range(len(c))] for c in h.contexts],
        "depolarized": [
            [Fraction(1, 3) * int(k == 0) + Fraction(2, 3) / len(c) for k in range(len(c))] for c in h.contexts
        ],
    }
    operational = {name: cabello.alpha_prime_operational(s, f) for name, s in samples.items()}
    identity_ok = all(v == len(f.terms) for v in operational.values())

    merged = cabello.analyze_extension(cabello.extend_hypergraph(h, True), args.limit)
    unmerged = cabello.analyze_extension(cabello.extend_hypergraph(h, False), args.limit)
    n = h.node_count
    unique = merged.count == 1 and merged.assignments[0] == (0,) * n + (1,)
    results = {
        "terms": len(f.terms),
        "max_alpha_prime": scan["max_alpha_prime"],
        "max_alpha": scan["max_alpha"],
        "maximizer_count": len(scan["maximizers"]),
        "maximizers_violate_normalization": unnormalized,
        "alpha_identity_holds": scan["identity_holds"],
        "alpha_prime_operational": {k: fmt(v) for k, v in operational.items()},
        "operational_identity_confirmed": identity_ok,
        "merged_extension": {
            "nodes": h.node_count + 1,
            "normalized_assignments": merged.count,
            "unique_all_base_zero": unique,
        },
        "unmerged_extension": {
            "nodes": h.node_count + len(h.contexts),
            "normalized_assignments": unmerged.count,
            "base_subnormalized_assignments": unmerged.base_subnormalized_count,
            "bijection": unmerged.lift_is_bijection,
        },
    }
    ok = scan["identity_holds"] and identity_ok and unmerged.lift_is_bijection
    return _report("compare-cabello", args.file, digest, results, {"total_s": time.perf_counter() - t0}), (
        EXIT_YES if ok else EXIT_NO
    )


def render_text(report: dict) -> str:
    lines = [f"command: {report['command']}", f"input: {report['input']} (sha256 {report['input_sha256'][:12]})"]

    def walk(prefix: str, value: Any) -> None:
        if isinstance(value, dict):
            for k, v in value.items():
                walk(f"{prefix}{k}." if isinstance(v, dict) else f"{prefix}{k}", v)
        elif isinstance(value, list) and value and isinstance(value[0], list):
            lines.append(f"{prefix}:")
            for item in value:
                lines.append("  " + " ".join(str(x) for x in item))
        elif isinstance(value, list):
            lines.append(f"{prefix}: ({', '.join(str(x) for x in value)})")
        else:
            lines.append(f"{prefix}: {value}")

    walk("", report["results"])
    if "timings" in report:
        for k, v in report["timings"].items():
            lines.append(f"time.{k}: {v:.3f}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ksnc", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="hypergraph document (JSON)")
    common.add_argument("--json", action="store_true", help="machine-readable report")
    common.add_argument("--no-timings", action="store_true", help="omit timings for byte-stable output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-color", parents=[common], help="search for a deterministic noncontextual assignment")
    p.add_argument("--mode", choices=[m.value for m in NormalizationMode], default="exactly-one")
    p.set_defaults(func=cmd_check_color)

    p = sub.add_parser("bound", parents=[common], help="noncontextual bound on A by exact vertex enumeration")
    p.add_argument("--oracle", action="store_true", help="cross-check with one exact LP per context selection")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("quantum", parents=[common], help="validate rays and compute the ideal quantum A")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(func=cmd_quantum)

    p = sub.add_parser("noise", parents=[common], help="depolarizing-noise value of A and violation threshold")
    p.add_argument("--p1", type=_probability)
    p.add_argument("--p2", type=_probability)
    p.add_argument("--sweep", type=_grid, metavar="START:STOP:STEP", help="grid for both p1 and p2")
    p.add_argument("--csv", help="write the sweep here instead of standard output")
    p.add_argument("--trials", type=int, help="Monte-Carlo trials per preparation")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("compare-cabello", parents=[common], help="parity-inequality bounds and extensions")
    p.add_argument("--limit", type=int, default=DEFAULT_ENUMERATION_LIMIT, help="node limit for exhaustive scans")
    p.set_defaults(func=cmd_compare_cabello)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_YES
    func: Callable = args.func
    try:
        report, code = func(args)
    except (CommandError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if report is None:
        return code
    if args.no_timings:
        report.pop("timings", None)
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print(render_text(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
