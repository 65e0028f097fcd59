"""
Command-line front end: ``python -m qfe <command> ...``.

Exit status is 0 when every check passes, 1 when a check runs and fails, and 2 for bad
input or any other qfe error.
"""
import argparse
import json
import logging
import re
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from pydantic import ValidationError

from qfe.config import settings
from qfe.contiguous import IndexBox, count_equations, count_series, enumerate_box, rect_sizes
from qfe.errors import QfeError
from qfe.euler import product_scan
from qfe.golden import artifact_names, run_artifact
from qfe.partitions import (
    THM11_VARIANTS, count_at_most_3, count_bicolored_gap, count_bicolored_match,
    count_gordon, count_thm11, verify_thm12,
)
from qfe.schemas import ProductSpec, SearchConfig, SeriesParams
from qfe.search import run_search
from qfe.series import eval_series, expand_product
from qfe.solver import ExtractedSystem, UniquenessError, solve_keep_set, verify_system, verify_uniqueness

logger = logging.getLogger("qfe")

_PAIR_RE = re.compile(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)")


# ==================== Argument parsing ====================

def parse_box(text: str) -> tuple[int, int, int, int]:
    values = [int(v) for v in re.split(r"[,\s]+", text.strip().strip("()[]")) if v]
    if len(values) != 4:
        raise argparse.ArgumentTypeError(f"box needs m1,M1,m2,M2, got '{text}'")
    return tuple(values)


def parse_keep(text: str) -> list[tuple[int, int]]:
    pairs = [(int(a), int(b)) for a, b in _PAIR_RE.findall(text)]
    if not pairs:
        raise argparse.ArgumentTypeError(f"keep-set must look like '(a,b);(c,d)', got '{text}'")
    return pairs


def parse_params(text: str) -> SeriesParams:
    try:
        return SeriesParams.parse(text)
    except (ValueError, ValidationError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def parse_int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Machine-readable output")
    common.add_argument("--verbose", action="store_true", help="Debug logging")

    parser = argparse.ArgumentParser(prog="qfe", description="q-difference equations of double series")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", parents=[common], help="Expand a series or a product")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--params", type=parse_params, help="B11,B22,B12,C1,C2,D1,D2,K1,K2,gamma[,eps1,eps2]")
    source.add_argument("--product", help="e.g. '(q^1,q^4;q^5)_inf^-1'")
    p.add_argument("--order", type=int, default=20)
    p.add_argument("--x-power", type=int, default=None, help="Substitute x = q^s")

    p = sub.add_parser("contiguous", parents=[common], help="List the contiguous equations of a box")
    p.add_argument("--params", type=parse_params, required=True)
    p.add_argument("--box", type=parse_box, required=True)

    p = sub.add_parser("solve", parents=[common], help="Extract the system for a keep-set")
    p.add_argument("--params", type=parse_params, required=True)
    p.add_argument("--box", type=parse_box, required=True)
    p.add_argument("--keep", type=parse_keep, required=True)
    p.add_argument("--order", type=int, default=None, help="Verification order")
    p.add_argument("--allow-partial", action="store_true")
    p.add_argument("--out", type=Path, default=None, help="Write the system as JSON")

    p = sub.add_parser("verify", parents=[common], help="Re-verify a saved system or hit file")
    p.add_argument("file", type=Path)
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--uniqueness", action="store_true")

    p = sub.add_parser("euler", parents=[common], help="Euler product scan of a parameter tuple")
    p.add_argument("--params", type=parse_params, required=True)
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--kmax", type=int, default=None)
    p.add_argument("--x-powers", type=parse_int_list, default=[0])
    p.add_argument("--max-offset", type=int, default=0)
    p.add_argument("--keep-trivial", action="store_true")

    p = sub.add_parser("partitions", parents=[common], help="Partition class counts")
    p.add_argument("kind", choices=["thm12", "thm11", "match", "gap", "at-most-3", "gordon"])
    p.add_argument("--n", type=int, required=True, help="Weight (largest weight for thm12)")
    p.add_argument("--variant", default=None)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--i", type=int, default=3)

    p = sub.add_parser("search", parents=[common], help="Run a parameter search")
    p.add_argument("--config", type=Path, default=None, help="SearchConfig JSON file")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--order", type=int, default=None, help="Verification order")
    p.add_argument("--kmax", type=int, default=None)
    p.add_argument("--no-resume", action="store_true")

    p = sub.add_parser("repro", parents=[common], help="Reproduce a reference result")
    p.add_argument("name", nargs="?", default=None, help="Artifact name or 'all'")
    p.add_argument("--list", action="store_true")
    return parser


# ==================== Commands ====================

def _emit(args: argparse.Namespace, data: Any, lines: Sequence[str]):
    if args.json:
        print(json.dumps(data, indent=2))
    else:
        for line in lines:
            print(line)


def cmd_expand(args: argparse.Namespace) -> int:
    if args.product:
        series = expand_product(ProductSpec.parse(args.product), args.order)
    else:
        series = eval_series(args.params, args.order, args.x_power)
    coeffs = series.q_coefficients()
    data = {
        "order": series.order,
        "terms": [[x, q, c] for (x, q), c in series.items()],
        "q_coefficients": coeffs,
    }
    lines = [str(series)] if args.params and args.x_power is None else [" ".join(map(str, coeffs))]
    _emit(args, data, lines)
    return 0


def cmd_contiguous(args: argparse.Namespace) -> int:
    box = IndexBox.for_params(args.params, args.box)
    equations = [str(eq) for eq in enumerate_box(args.params, box)]
    dm1, dm2 = box.widths
    data = {
        "equations": equations,
        "count_equations": count_equations(args.params, dm1, dm2),
        "count_series": count_series(args.params, dm1, dm2),
        "rect_sizes": list(rect_sizes(args.params)),
    }
    _emit(args, data, equations + [f"{len(equations)} equations, {data['count_series']} series"])
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    box = IndexBox.for_params(args.params, args.box)
    basis, system = solve_keep_set(args.params, box, args.keep, args.allow_partial)
    order = args.order or settings.QFE_ORDER
    report = verify_system(args.params, system, order)
    payload = system.to_dict(report.first_residual)
    if args.out:
        args.out.write_text(json.dumps(payload, indent=2) + "\n")
        logger.info(f"✅ System written to {args.out}")
    lines = [f"annihilator dimension {basis.dimension}"]
    lines += [f"  {line}" for line in system.reduced_lines()]
    lines += system.lines()
    lines.append(f"verified through q^{order}" if report.ok else f"residual at q^{report.first_residual}")
    data = {
        "basis_dimension": basis.dimension,
        "reduced": system.reduced_lines(),
        "system": payload,
        "residual_orders": report.residual_orders,
        "verified": report.ok,
    }
    _emit(args, data, lines)
    return 0 if report.ok and system.complete else 1


def _load_systems(path: Path) -> list[ExtractedSystem]:
    text = path.read_text().strip()
    if not text:
        return []
    if text.startswith("{") and "\n{" not in text:
        data = json.loads(text)
        return [ExtractedSystem.from_dict(data.get("system", data))]
    return [ExtractedSystem.from_dict(json.loads(line)["system"]) for line in text.splitlines() if line.strip()]


def cmd_verify(args: argparse.Namespace) -> int:
    order = args.order or settings.QFE_ORDER
    ok = True
    results = []
    systems = _load_systems(args.file)
    for system in systems:
        report = verify_system(system.params, system, order)
        entry = {"keep": [list(p) for p in system.keep], "residual_orders": report.residual_orders, "ok": report.ok}
        if args.uniqueness:
            try:
                verify_uniqueness(system, order)
                entry["uniqueness"] = "pass"
            except UniquenessError as exc:
                entry["uniqueness"] = f"fail: {exc}"
                ok = False
        ok = ok and report.ok
        results.append(entry)
    lines = [
        f"{system.params} keep {entry['keep']}: " + ("ok" if entry["ok"] else f"residuals {entry['residual_orders']}")
        for system, entry in zip(systems, results)
    ]
    _emit(args, {"order": order, "systems": results, "ok": ok}, lines)
    return 0 if ok else 1


def cmd_euler(args: argparse.Namespace) -> int:
    hits = product_scan(args.params, args.order, args.kmax, args.x_powers,
                        discard_trivial=not args.keep_trivial, max_offset=args.max_offset)
    records = [hit.to_record() for hit in hits]
    lines = [
        f"S[{r.c1},{r.c2}](q^{r.s}): period {r.period}"
        + (f" after {r.offset}" if r.offset else "") + f", {r.profile}"
        for r in records
    ]
    _emit(args, [r.model_dump() for r in records], lines or ["no periodic series"])
    return 0


def cmd_partitions(args: argparse.Namespace) -> int:
    n = args.n
    if args.kind == "thm12":
        report = verify_thm12(n)
        lines = [f"{row[0]:>3} {row[1]:>6} {row[2]:>6} {row[3]:>6}" for row in report.rows]
        lines.append("ok" if report.ok else f"mismatch at n={report.first_mismatch}")
        data = {"N": n, "rows": report.rows, "ok": report.ok, "first_mismatch": report.first_mismatch}
        _emit(args, data, lines)
        return 0 if report.ok else 1
    if args.kind == "at-most-3":
        counts = {"total": count_at_most_3(n)}
    elif args.kind == "gordon":
        counts = {"total": count_gordon(n, args.k, args.i)}
    else:
        fn, default = {
            "thm11": (count_thm11, "full"),
            "match": (count_bicolored_match, "t1"),
            "gap": (count_bicolored_gap, "t1"),
        }[args.kind]
        variant = args.variant or default
        if args.kind == "thm11" and variant not in THM11_VARIANTS:
            raise ValueError(f"variant must be one of {', '.join(THM11_VARIANTS)}")
        by_parts = {m: fn(m, n, variant) for m in range(n + 1)}
        counts = {"total": sum(by_parts.values()), "by_parts": {m: c for m, c in by_parts.items() if c}}
    lines = [f"{args.kind} n={n}: {counts['total']}"]
    lines += [f"  {m} parts: {c}" for m, c in counts.get("by_parts", {}).items()]
    _emit(args, counts, lines)
    return 0


def load_search_config(path: Optional[Path], args: argparse.Namespace) -> SearchConfig:
    """Config file values, overridden by the numeric flags that were given."""
    data = json.loads(path.read_text()) if path else {}
    overrides = {"jobs": args.jobs, "verify_order": args.order, "kmax": args.kmax}
    data.update({k: v for k, v in overrides.items() if v is not None})
    return SearchConfig(**data)


def cmd_search(args: argparse.Namespace) -> int:
    cfg = load_search_config(args.config, args)
    summary = run_search(cfg, args.out, resume=not args.no_resume)
    lines = [
        f"tasks {summary.tasks} (resumed {summary.resumed}): "
        f"{summary.hits} hits, {summary.skipped} skipped, {summary.failed} failed",
        f"hits: {summary.hit_file}",
        f"failures: {summary.failure_file}",
    ]
    _emit(args, summary.model_dump(), lines)
    return 0


def cmd_repro(args: argparse.Namespace) -> int:
    if args.list or args.name is None:
        _emit(args, artifact_names(), artifact_names())
        return 0
    names = artifact_names() if args.name == "all" else [args.name]
    results = [run_artifact(name) for name in names]
    lines = []
    for result in results:
        lines.append(f"{'PASS' if result.passed else 'FAIL'} {result.name}: {result.description}")
        lines += [f"  {line}" for line in (result.output if result.passed else result.diff)]
    _emit(args, [r.model_dump() for r in results], lines)
    return 0 if all(r.passed for r in results) else 1


COMMANDS = {
    "expand": cmd_expand,
    "contiguous": cmd_contiguous,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "euler": cmd_euler,
    "partitions": cmd_partitions,
    "search": cmd_search,
    "repro": cmd_repro,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.QFE_LOG_LEVEL,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (QfeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
